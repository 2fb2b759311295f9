// Command-line front end; subcommands land in a later pass.
#include <cstdio>

int main() {
  std::puts("mclear: under construction");
  return 2;
}
