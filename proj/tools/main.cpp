#include <cstdio>

int main() {
    std::puts("qalg: not yet wired");
    return 0;
}
