#include <cstdio>

int main() {
    std::puts("prlat: CLI under construction");
    return 0;
}
