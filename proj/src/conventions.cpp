#include "veroweb/conventions.hpp"

#include <cstdint>
#include <sstream>

namespace veroweb {

std::string conventions_digest() {
  std::ostringstream blob;
  blob << "orientation=" << Conventions::orientation << ";mobius=" << Conventions::mobius_map
       << ";pencil=" << Conventions::pencil_sign << ";jacobiator=" << Conventions::jacobiator
       << ";hamiltonian=" << Conventions::hamiltonian_field
       << ";heisenberg_sign=" << Conventions::heisenberg_sign
       << ";ew_residual=" << Conventions::ew_residual;
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : blob.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

}  // namespace veroweb
