// Placeholder main; subcommands are filled in once the library lands.
#include <cstdio>

int main() {
    std::puts("stvmargin: not yet wired up");
    return 0;
}
