namespace slitstrip {}
