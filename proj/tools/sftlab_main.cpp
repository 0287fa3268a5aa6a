#include <cstdio>

int main() {
  std::printf("sftlab: command dispatch not yet implemented\n");
  return 2;
}
