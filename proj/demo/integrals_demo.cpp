// Characteristic integrals of a chosen algebra and a check that the total
// y-derivative kills them.
//   demo_integrals [TYPE RANK]     default: G 2

#include <iostream>
#include <string>

#include "toda/dsgauge.hpp"

int main(int argc, char** argv) {
  using namespace toda;
  const std::string type = argc > 2 ? argv[1] : "G";
  const int rank = argc > 2 ? std::stoi(argv[2]) : 2;
  LieData lie = make_lie_data(parse_cartan_type(type), rank);
  GaugeResult res = ds_gauge(lie);
  std::cout << lie.roots().name() << " exponents:";
  for (int m : lie.slice.exponents) std::cout << ' ' << m;
  std::cout << '\n';
  for (std::size_t j = 0; j < res.integrals.size(); ++j) {
    const DiffPoly& I = res.integrals[j];
    std::cout << "I" << j + 1 << " (degree " << res.degrees[j] << ", " << I.terms().size() << " terms)"
              << (y_derivation(I).is_zero() ? "  Y(I) = 0" : "  Y(I) != 0") << '\n';
    if (I.terms().size() <= 12) std::cout << "  " << I << '\n';
  }
}
