#include <cstdio>
int main(){ std::puts("soskit: under construction"); return 2; }
