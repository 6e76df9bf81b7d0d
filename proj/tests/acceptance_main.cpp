#include <cstdio>
int main(int, char**) { std::puts("[FAIL] acceptance criteria not implemented yet"); return 1; }
