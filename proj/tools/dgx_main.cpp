#include <iostream>

int main() {
  std::cout << "dgx: placeholder\n";
  return 0;
}
