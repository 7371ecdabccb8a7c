#include <iostream>

int main() {
    std::cout << "circuitopt cli placeholder\n";
    return 0;
}
