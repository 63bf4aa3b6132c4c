#include <catch2/catch_amalgamated.hpp>

#include <urnlab/spectral.hpp>

using namespace urnlab;

namespace {

UrnSpec make_spec(std::initializer_list<std::initializer_list<double>> rows,
                  std::initializer_list<double> x0) {
  UrnSpec u;
  u.initial = Vec<double>(x0);
  int s = u.colors();
  u.replacement = Mat<double>(s, s);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) u.replacement(i, j++) = v;
    ++i;
  }
  return u;
}

const UrnSpec kStrictly = make_spec({{2, 1}, {1, 2}}, {1, 1});
const UrnSpec kCritical = make_spec({{3, 1}, {1, 3}}, {1, 1});
const UrnSpec kLarge = make_spec({{4, 1}, {1, 4}}, {1, 1});
const UrnSpec kNegDiag = make_spec({{-1, 2}, {1, 0}}, {2, 1});
const UrnSpec kJordan4 =
    make_spec({{0, 0, 1, 3}, {1, 2, 1, 0}, {1, 0, 3, 0}, {1, 1, 0, 2}}, {1, 1, 1, 1});

}  // namespace

TEST_CASE("characteristic polynomial and rational roots") {
  auto ex = to_exact(kJordan4);
  auto c = char_poly(ex.replacement);
  // det(xI - R) = x^4 - 7x^3 + 12x^2 + 4x - 16 = (x-4)(x-2)^2(x+1)
  REQUIRE(c.size() == 5);
  CHECK(c[4] == Rat(1));
  CHECK(c[3] == Rat(-7));
  CHECK(c[2] == Rat(12));
  CHECK(c[1] == Rat(4));
  CHECK(c[0] == Rat(-16));
  auto roots = rational_roots(c);
  REQUIRE(roots.size() == 3);
  CHECK(roots[Rat(4)] == 1);
  CHECK(roots[Rat(2)] == 2);
  CHECK(roots[Rat(-1)] == 1);
}

TEST_CASE("exact decomposition of the symmetric two-color spec") {
  auto dec = decompose_exact(to_exact(kStrictly));
  REQUIRE(dec.s == 2);
  CHECK(dec.eigenvalues[0] == CxQ{Rat(1), Rat(0)});
  CHECK(dec.eigenvalues[1] == CxQ{Rat(1, 3), Rat(0)});
  CHECK(dec.chained == std::vector<char>{0, 0});
  // u_1 = ones; v_1 = (1/2, 1/2); duality is exact
  CHECK(dec.u(0, 0) == CxQ{Rat(1), Rat(0)});
  CHECK(dec.u(0, 1) == CxQ{Rat(1), Rat(0)});
  CHECK(dec.v(0, 0) == CxQ{Rat(1, 2), Rat(0)});
  CHECK(dec.v(1, 0) == CxQ{Rat(1, 2), Rat(0)});
  CHECK(dec.u * dec.v == Mat<CxQ>::identity(2));
}

TEST_CASE("exact decomposition of the crafted 4-color spec with a chained block") {
  auto dec = decompose_exact(to_exact(kJordan4));
  REQUIRE(dec.s == 4);
  REQUIRE(dec.blocks.size() == 3);
  CHECK(dec.blocks[0].eigenvalue == CxQ{Rat(1), Rat(0)});
  CHECK(dec.blocks[0].size == 1);
  CHECK(dec.blocks[1].eigenvalue == CxQ{Rat(1, 2), Rat(0)});
  CHECK(dec.blocks[1].size == 2);
  CHECK(dec.blocks[2].eigenvalue == CxQ{Rat(-1, 4), Rat(0)});
  CHECK(dec.blocks[2].size == 1);
  CHECK(dec.chained == std::vector<char>{0, 0, 1, 0});

  // stationary composition, computed independently
  CHECK(dec.v(0, 0) == CxQ{Rat(1, 5), Rat(0)});
  CHECK(dec.v(1, 0) == CxQ{Rat(3, 20), Rat(0)});
  CHECK(dec.v(2, 0) == CxQ{Rat(7, 20), Rat(0)});
  CHECK(dec.v(3, 0) == CxQ{Rat(3, 10), Rat(0)});

  // chain relation, checked directly against B = R/4
  Mat<CxQ> bc = complexify(dec.b);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      CxQ acc{};
      for (int j = 0; j < 4; ++j) acc += bc(i, j) * dec.u(k, j);
      acc -= dec.eigenvalues[k] * dec.u(k, i);
      if (dec.chained[k]) acc -= dec.u(k - 1, i);
      CHECK(acc == CxQ{});
    }
  }
  CHECK(dec.u * dec.v == Mat<CxQ>::identity(4));
}

TEST_CASE("classification of the reference specs") {
  auto cls = [](const UrnSpec& s) { return classify(decompose_exact(to_exact(s))); };

  auto strict = cls(kStrictly);
  CHECK(strict.kind == UrnKind::StrictlySmall);
  CHECK(strict.sigma2 == Rat(1, 3));
  CHECK(strict.nu == 0);

  auto crit = cls(kCritical);
  CHECK(crit.kind == UrnKind::CriticallySmall);
  CHECK(crit.sigma2 == Rat(1, 2));
  CHECK(crit.d == 0);
  CHECK(crit.nu == 1);

  auto large = cls(kLarge);
  CHECK(large.kind == UrnKind::Large);
  CHECK(large.sigma2 == Rat(3, 5));

  auto neg = cls(kNegDiag);
  CHECK(neg.kind == UrnKind::StrictlySmall);
  CHECK(neg.sigma2 == Rat(-2));

  auto jordan = cls(kJordan4);
  CHECK(jordan.kind == UrnKind::CriticallySmall);
  CHECK(jordan.sigma2 == Rat(1, 2));
  CHECK(jordan.d == 1);
  CHECK(jordan.nu == 3);
  REQUIRE(jordan.critical.size() == 1);
  CHECK(jordan.critical[0] == CxQ{Rat(1, 2), Rat(0)});
}

TEST_CASE("floating point decomposition matches the exact one") {
  for (const UrnSpec* spec : {&kStrictly, &kCritical, &kLarge, &kNegDiag, &kJordan4}) {
    auto ed = decompose_exact(to_exact(*spec));
    auto fd = decompose_float(*spec);
    REQUIRE(fd.blocks.size() == ed.blocks.size());
    for (std::size_t b = 0; b < ed.blocks.size(); ++b) {
      CHECK(fd.blocks[b].size == ed.blocks[b].size);
      CHECK(std::abs(fd.blocks[b].eigenvalue.re - approx(ed.blocks[b].eigenvalue.re)) < 1e-9);
      CHECK(std::abs(fd.blocks[b].eigenvalue.im) < 1e-9);
    }
    auto ec = classify(ed);
    auto fc = classify(fd);
    CHECK(static_cast<int>(fc.kind) == static_cast<int>(ec.kind));
    CHECK(fc.d == ec.d);
    CHECK(fc.nu == ec.nu);
    // U V = I within float tolerance
    Mat<CxD> uv = fd.u * fd.v;
    for (int i = 0; i < fd.s; ++i)
      for (int j = 0; j < fd.s; ++j)
        CHECK(mag(uv(i, j) - (i == j ? CxD{1.0, 0.0} : CxD{})) < 1e-8);
  }
}

TEST_CASE("complex spectra take the float path") {
  // cyclic replacement: normalized eigenvalues 1, omega, omega^2
  auto spec = make_spec({{0, 2, 0}, {0, 0, 2}, {2, 0, 0}}, {1, 1, 1});
  CHECK_THROWS_AS(decompose_exact(to_exact(spec)), ExactSpectrumUnavailable);

  auto fd = decompose_float(spec);
  REQUIRE(fd.blocks.size() == 3);
  CHECK(fd.blocks[0].eigenvalue == CxD{1.0, 0.0});
  // conjugate pair at -1/2 +- i sqrt(3)/2, listed with ascending imaginary part
  CHECK(std::abs(fd.blocks[1].eigenvalue.re + 0.5) < 1e-9);
  CHECK(std::abs(fd.blocks[1].eigenvalue.im + std::sqrt(3.0) / 2) < 1e-9);
  CHECK(fd.blocks[2].eigenvalue.im > 0);
  CHECK(fd.blocks[1].eigenvalue.im == -fd.blocks[2].eigenvalue.im);

  auto c = classify(fd);
  CHECK(c.kind == UrnKind::StrictlySmall);
  CHECK(std::abs(c.sigma2 + 0.5) < 1e-9);
}

TEST_CASE("inseparable clusters are rejected as ill-conditioned") {
  auto spec = make_spec({{1, 1e-12}, {1e-12, 1}}, {1, 1});
  CHECK_THROWS_AS(decompose_float(spec), IllConditioned);
}

TEST_CASE("projections decompose the identity on small specs") {
  auto dec = decompose_exact(to_exact(kJordan4));
  Vec<CxQ> x{CxQ{Rat(3), Rat(0)}, CxQ{Rat(-1), Rat(0)}, CxQ{Rat(7), Rat(0)}, CxQ{Rat(2), Rat(0)}};
  auto content = project(dec, SpectralPart::Content, x);
  auto small = project(dec, SpectralPart::SmallPart, x);
  auto critical = project(dec, SpectralPart::CriticalPart, x);
  for (int i = 0; i < 4; ++i) {
    CHECK(content[i] + small[i] + critical[i] == x[i]);
    // content part is u_1(x) v_1 = 11 * v_1
    CHECK(content[i] == CxQ{Rat(11), Rat(0)} * dec.v(i, 0));
  }
}

TEST_CASE("projected spectral parts are invariant under the operator") {
  auto dec = decompose_exact(to_exact(kJordan4));
  Mat<CxQ> bt = transpose(complexify(dec.b));  // action on composition vectors
  Vec<CxQ> x{CxQ{Rat(1), Rat(0)}, CxQ{Rat(2), Rat(0)}, CxQ{Rat(0), Rat(0)}, CxQ{Rat(5), Rat(0)}};
  auto crit = project(dec, SpectralPart::CriticalPart, x);
  auto moved = matvec(bt, crit);
  auto back = project(dec, SpectralPart::CriticalPart, moved);
  for (int i = 0; i < 4; ++i) CHECK(moved[i] == back[i]);
}
