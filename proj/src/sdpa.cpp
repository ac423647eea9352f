#include <iomanip>
#include <ostream>

#include "ecdiv/conic.hpp"

namespace ecdiv::conic {

void write_sdpa(const ConicProgram& p, std::ostream& os) {
  const StandardForm sf = lower(p);
  const Index neq = sf.eq_rhs.size();
  os << std::setprecision(17);
  os << "\"ecdiv export: " << (p.sense() == Sense::maximize ? "maximization negated" : "minimization")
     << ", objective constant " << p.objective().constant() << "\"\n";
  os << sf.num_vars << "\n";
  os << sf.blocks.size() + (neq > 0 ? 1 : 0) << "\n";
  for (const auto& b : sf.blocks) os << b.dim << " ";
  if (neq > 0) os << -2 * neq;
  os << "\n";
  for (Index i = 0; i < sf.num_vars; ++i) os << sf.c(i) << (i + 1 < sf.num_vars ? " " : "\n");
  for (std::size_t bi = 0; bi < sf.blocks.size(); ++bi) {
    const auto& b = sf.blocks[bi];
    for (Index j = 0; j < b.dim; ++j)
      for (Index i = 0; i <= j; ++i)
        if (b.constant(i, j) != 0.0) os << 0 << " " << bi + 1 << " " << i + 1 << " " << j + 1 << " " << -b.constant(i, j) << "\n";
    for (const auto& t : b.terms)
      for (const auto& c : t.coeffs)
        if (c.row <= c.col) os << t.var + 1 << " " << bi + 1 << " " << c.row + 1 << " " << c.col + 1 << " " << c.value << "\n";
  }
  if (neq > 0) {
    const std::size_t blk = sf.blocks.size() + 1;
    for (Index r = 0; r < neq; ++r) {
      const Index up = 2 * r + 1, down = 2 * r + 2;
      if (sf.eq_rhs(r) != 0.0) {
        os << 0 << " " << blk << " " << up << " " << up << " " << sf.eq_rhs(r) << "\n";
        os << 0 << " " << blk << " " << down << " " << down << " " << -sf.eq_rhs(r) << "\n";
      }
      for (Index i = 0; i < sf.num_vars; ++i) {
        const double g = sf.eq_matrix(r, i);
        if (g == 0.0) continue;
        os << i + 1 << " " << blk << " " << up << " " << up << " " << g << "\n";
        os << i + 1 << " " << blk << " " << down << " " << down << " " << -g << "\n";
      }
    }
  }
}

}  // namespace ecdiv::conic
