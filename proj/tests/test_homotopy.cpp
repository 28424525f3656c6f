// Homotopy equivalences, SHE axioms, obstruction classes, modification,
// extension, and the fixture generator.

#include <gtest/gtest.h>

#include "support.hpp"

namespace ipl {
namespace {

using testing::shape;

// Side-condition SDR (cone fixture) viewed as a homotopy equivalence with L = 0.
HeData sdr_he(std::uint64_t seed = 3) { return he_from_sdr(fixture_generate(seed, shape({2, 1, 1}, 3)).sdr); }

SheData identity_she(const ChainComplex& c, int cap) {
  SheData s;
  s.M = s.N = c;
  s.index_cap = cap;
  for (int m = 0; m <= cap; ++m) {
    s.F.push_back(m == 0 ? GradedMap::identity(c.module) : GradedMap(c.module, c.module, 2 * m));
    s.G.push_back(m == 0 ? GradedMap::identity(c.module) : GradedMap(c.module, c.module, 2 * m));
    s.H.emplace_back(c.module, c.module, 2 * m + 1);
    s.L.emplace_back(c.module, c.module, 2 * m + 1);
  }
  return s;
}

// ---- SHE axioms ----

TEST(SheAxioms, IdentityValid) { EXPECT_TRUE(validate_she(identity_she(testing::interval_complex(), 3)).ok()); }

TEST(SheAxioms, SideConditionSdrWithZeroTail) {
  const HeData he = sdr_he();
  auto s = trivial_extension(he, 4);
  ASSERT_TRUE(s);
  EXPECT_TRUE(validate_she(*s).ok());
}

TEST(SheAxioms, NonCycleInF2) {
  // Room for a degree 2 map with nonzero D.
  const ModulePtr m = share(GradedModule::unfiltered(0, {1, 1, 1}));
  GradedMap d(m, m, -1);
  d.block(2)(0, 0) = 1;
  const ChainComplex c(m, d);
  SheData s = identity_she(c, 1);
  ASSERT_TRUE(validate_she(s).ok());
  GradedMap x(m, m, 2);
  x.block(0)(0, 0) = 1;
  ASSERT_FALSE(hom_differential(c, c, x).is_zero());
  s.F[1] += x;
  const Report r = validate_she(s);
  // The F_2 axiom fails, and so do the H_3 and L_3 axioms, whose right-hand
  // sides contain F_2. The G_2 axiom is untouched.
  ASSERT_EQ(r.findings.size(), 3u);
  EXPECT_EQ(r.findings[0].check, "d_N F_2 - F_2 d_M");
  EXPECT_EQ(r.findings[1].check, "d_M H_3 + H_3 d_M");
  EXPECT_EQ(r.findings[2].check, "d_N L_3 + L_3 d_N");
  EXPECT_FALSE(r.mentions("d_M G_2 - G_2 d_N"));
}

// ---- obstruction cycles ----

TEST(Obstruction, SideConditionSdrVanishesWithZeroWitness) {
  const HeData he = sdr_he();
  const ObstructionPair p = obstruction_cycles(he);
  EXPECT_TRUE(p.o_M.is_zero());
  EXPECT_TRUE(p.o_N.is_zero());
  ASSERT_TRUE(p.class_M_vanishes && p.class_N_vanishes);
  EXPECT_TRUE(p.witness_M->is_zero());
  EXPECT_TRUE(p.witness_N->is_zero());
  EXPECT_TRUE(obstruction_classes_linked(he));
}

TEST(Obstruction, ZeroDifferentialFixture) {
  const HeData he = obstruction_fixture();
  ASSERT_TRUE(validate_he(he).ok());
  const ObstructionPair p = obstruction_cycles(he);
  EXPECT_EQ(p.o_M, -he.L);
  EXPECT_FALSE(p.o_M.is_zero());
  EXPECT_FALSE(p.class_M_vanishes);
  EXPECT_FALSE(p.class_N_vanishes);
  EXPECT_FALSE(obstruction_classes_linked(he));
}

TEST(Obstruction, CyclesAndLinkageOnFixtures) {
  int vanish = 0, nonzero = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const HeData he = fixture_generate(seed, shape({2, 1, 2}, 3)).he;
    ASSERT_TRUE(validate_he(he).ok());
    const ObstructionPair p = obstruction_cycles(he);
    EXPECT_TRUE(hom_differential(he.M, he.N, p.o_M).is_zero());
    EXPECT_TRUE(hom_differential(he.N, he.M, p.o_N).is_zero());
    EXPECT_EQ(p.class_M_vanishes, p.class_N_vanishes) << "seed " << seed;
    if (p.witness_M) {
      EXPECT_EQ(hom_differential(he.M, he.N, *p.witness_M), p.o_M);
    }
    if (p.witness_N) {
      EXPECT_EQ(hom_differential(he.N, he.M, *p.witness_N), p.o_N);
    }
    (p.class_M_vanishes ? vanish : nonzero)++;
  }
  EXPECT_GT(vanish, 0);
  EXPECT_GT(nonzero, 0);
}

// ---- homotopy modification ----

TEST(Modify, SideConditionSdrKeepsH) {
  const HeData he = sdr_he();
  EXPECT_EQ(modify_homotopy_H(he).he.H, he.H);
}

TEST(Modify, ZeroDifferentialFixtureH) {
  const HeData he = obstruction_fixture();
  const ModifiedHe m = modify_homotopy_H(he);
  EXPECT_EQ(m.he.H, he.L);
  EXPECT_TRUE(validate_he(m.he).ok());
  const ObstructionPair p = obstruction_cycles(m.he);
  EXPECT_TRUE(p.o_M.is_zero());
  EXPECT_TRUE(p.o_N.is_zero());
  EXPECT_TRUE(p.class_M_vanishes && p.class_N_vanishes);
}

TEST(Modify, ZeroDifferentialFixtureL) {
  const HeData he = obstruction_fixture();
  const ModifiedHe m = modify_homotopy_L(he);
  EXPECT_TRUE(m.he.L.is_zero());
  EXPECT_TRUE(obstruction_classes_linked(m.he));
}

TEST(Modify, SideConditionSdrL) {
  const HeData he = sdr_he();
  const ModifiedHe m = modify_homotopy_L(he);
  EXPECT_EQ(m.he.L, he.L - he.F * (he.G * he.L - he.H * he.G));
  EXPECT_TRUE(m.he.L.is_zero());  // L = 0 and HG = 0
  EXPECT_TRUE(validate_he(m.he).ok());
}

TEST(Modify, ExplicitWitnessesOnFixtures) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const HeData he = fixture_generate(seed, shape({2, 2, 1}, 3)).he;
    for (const ModifiedHe& m : {modify_homotopy_H(he), modify_homotopy_L(he)}) {
      ASSERT_TRUE(validate_he(m.he).ok());
      const auto& p = m.obstruction;
      ASSERT_TRUE(p.witness_M && p.witness_N);
      EXPECT_EQ(hom_differential(m.he.M, m.he.N, *p.witness_M), m.he.F * m.he.H - m.he.L * m.he.F);
      EXPECT_EQ(hom_differential(m.he.N, m.he.M, *p.witness_N), m.he.G * m.he.L - m.he.H * m.he.G);
      EXPECT_TRUE(obstruction_classes_linked(m.he));
    }
    // No idempotence claim: a second application must still be valid.
    EXPECT_TRUE(validate_he(modify_homotopy_H(modify_homotopy_H(he).he).he).ok());
  }
}

// ---- trivial extension ----

TEST(TrivialExtension, Eligibility) {
  EXPECT_TRUE(trivial_extension(sdr_he(), 2));
  EXPECT_FALSE(trivial_extension(obstruction_fixture(), 2));
  auto s = trivial_extension(modify_homotopy_H(obstruction_fixture()).he, 3);
  ASSERT_TRUE(s);
  EXPECT_TRUE(validate_she(*s).ok());
}

// ---- extension ----

TEST(Extend, CapZeroReturnsInput) {
  const HeData he = obstruction_fixture();
  const SheData s = extend_to_she(he, 0);
  EXPECT_EQ(s.index_cap, 0);
  EXPECT_EQ(s.H[0], he.H);
  EXPECT_EQ(s.L[0], he.L);
}

TEST(Extend, ObstructedInput) {
  try {
    extend_to_she(obstruction_fixture(), 2);
    FAIL() << "expected an obstruction";
  } catch (const ExtensionObstructed& e) {
    EXPECT_NE(std::string(e.what()).find("extension obstructed"), std::string::npos);
  }
}

TEST(Extend, AgreesWithTrivialExtensionUpToBoundaries) {
  const HeData he = sdr_he();
  const SheData a = extend_to_she(he, 3);
  const SheData b = *trivial_extension(he, 3);
  ASSERT_TRUE(validate_she(a).ok());
  ASSERT_TRUE(validate_she(b).ok());
  EXPECT_EQ(a.F[0], b.F[0]);
  EXPECT_EQ(a.H[0], b.H[0]);
}

TEST(Extend, ZeroDifferentialAfterModification) {
  const HeData he = modify_homotopy_H(obstruction_fixture()).he;
  const SheData s = extend_to_she(he, 3);
  ASSERT_TRUE(validate_she(s).ok());
  // D = 0 everywhere, so each right-hand side vanished and the solved terms are 0.
  for (int m = 0; m <= 3; ++m) {
    EXPECT_TRUE(detail::she_rhs_f(s, m).is_zero());
    EXPECT_TRUE(detail::she_rhs_g(s, m).is_zero());
  }
}

TEST(Extend, RecalibratesWhenTheDirectSolveFails) {
  // d = 0 on Z in degrees 0..4. A cycle phi added to H_3 makes the level-4
  // right-hand side F_0 H_3 - L_3 F_0 = phi nonzero, and D = 0 cannot bound it.
  const ModulePtr m = share(GradedModule::unfiltered(0, {1, 1, 1, 1, 1}));
  SheData s = identity_she(ChainComplex::zero_differential(m), 1);
  GradedMap phi(m, m, 3);
  phi.block(0)(0, 0) = 1;
  phi.block(1)(0, 0) = 1;
  s.H[1] = phi;
  ASSERT_TRUE(validate_she(s).ok());
  ASSERT_FALSE(bounding_element(s.M, s.N, detail::she_rhs_f(s, 2)));
  const SheData out = extend_she(s, 3);
  ASSERT_TRUE(validate_she(out).ok());
  EXPECT_EQ(out.index_cap, 3);
  EXPECT_NE(out.H[1], phi);  // H_3 (or L_3) was corrected by a cycle
  EXPECT_TRUE(detail::she_rhs_f(out, 2).is_zero());
}

TEST(Extend, FixturesWithVanishingClassesReachCapThree) {
  int done = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const HeData he = fixture_generate(seed, shape({1, 2, 1}, 3)).he;
    if (!obstruction_classes_linked(he)) {
      EXPECT_THROW(extend_to_she(he, 3), ExtensionObstructed);
      continue;
    }
    const SheData s = extend_to_she(he, 3);
    ASSERT_TRUE(validate_she(s).ok()) << "seed " << seed;
    EXPECT_EQ(s.F[0], he.F);
    EXPECT_EQ(s.G[0], he.G);
    ++done;
  }
  EXPECT_GT(done, 5);
}

// ---- fixtures ----

TEST(Fixtures, Deterministic) {
  const Fixture a = fixture_generate(42, shape({3, 2, 1}, 4));
  const Fixture b = fixture_generate(42, shape({3, 2, 1}, 4));
  EXPECT_EQ(io::serialize({a.sdr}), io::serialize({b.sdr}));
  EXPECT_EQ(io::serialize({a.he}), io::serialize({b.he}));
  EXPECT_EQ(io::serialize({a.perturbation}), io::serialize({b.perturbation}));
}

TEST(Fixtures, DistinctSeedsDiffer) {
  EXPECT_NE(io::serialize({fixture_generate(1, shape({3, 2}, 3)).sdr}),
            io::serialize({fixture_generate(2, shape({3, 2}, 3)).sdr}));
}

TEST(Fixtures, DegenerateShape) {
  const Fixture fx = fixture_generate(9, shape({0, 0, 0}, 2));
  EXPECT_EQ(fx.sdr.M.module->total_rank(), 0u);
  EXPECT_TRUE(validate_sdr(fx.sdr).ok());
  EXPECT_TRUE(validate_he(fx.he).ok());
  EXPECT_TRUE(validate_perturbation(fx.perturbation).ok());
}

TEST(Fixtures, ValidByConstruction) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Fixture fx = fixture_generate(seed, shape({1 + seed % 3, 2, seed % 2}, 1 + int(seed % 5)));
    ASSERT_TRUE(validate_sdr(fx.sdr).ok());
    ASSERT_TRUE(check_side_conditions(fx.sdr).all());
    ASSERT_TRUE(validate_perturbation(fx.perturbation).ok());
    ASSERT_TRUE(validate_he(fx.he).ok());
  }
}

TEST(Fixtures, SeedZeroGolden) {
  const std::string golden = testing::read_text(testing::source_path("tests/golden/fixture_seed0_r21_f2.golden"));
  EXPECT_EQ(io::serialize({fixture_generate(0, shape({2, 1}, 2)).sdr}), golden);
}

}  // namespace
}  // namespace ipl
