#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace fotex;

namespace {

FiberMeasure parse_csv(const std::string& text, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return parse_fiber_csv(in, [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  });
}

std::string parse_error_message(const std::string& text) {
  try {
    parse_tensor_json(parse_json_text(text, "test"));
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

// tensor files ---------------------------------------------------------------

TEST(TensorJson, KmRoundTrip) {
  oracle::Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Sym4 a = t % 2 ? rng.sym4() : fot4_from_fibers(rng.measure(5));
    const std::string text = tensor_json(a).dump(2);
    const TensorFile tf = parse_tensor_json(parse_json_text(text, "t"));
    EXPECT_EQ(tf.format, kFormatKm);
    EXPECT_EQ(tf.frame(), Frame::Fixed);
    EXPECT_LE((tf.tensor() - a).norm(), 1e-15 * std::max(1.0, a.norm()));
    EXPECT_EQ(tf.km.m, km_from_sym4(a).m);
  }
}

TEST(TensorJson, CoefficientRoundTripExact) {
  oracle::Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Sym4 a = rng.sym4();
    const json j = tensor_json(a, Frame::Eigen, kFormatCoeffs);
    EXPECT_EQ(j["coefficients"].size(), 15u);
    const TensorFile tf = parse_tensor_json(parse_json_text(j.dump(), "t"));
    EXPECT_EQ(tf.frame(), Frame::Eigen);
    EXPECT_EQ(tf.tensor(), a);
  }
}

TEST(TensorJson, Fot2RoundTrip) {
  oracle::Rng rng(3);
  const Sym2 a = fot2_from_fibers(rng.measure(4));
  const Sym2 b = parse_fot2_json(parse_json_text(tensor_json(a).dump(), "t"));
  EXPECT_EQ(b.matrix(), a.matrix());
}

TEST(TensorJson, MalformedJson) {
  EXPECT_THROW(parse_json_text("{\"format\": ", "x"), ParseError);
  EXPECT_THROW(parse_json_text("not json", "x"), ParseError);
}

TEST(TensorJson, ErrorsNameTheField) {
  EXPECT_NE(parse_error_message("[1,2]").find("object"), std::string::npos);
  EXPECT_NE(parse_error_message("{}").find("format"), std::string::npos);
  EXPECT_NE(parse_error_message(R"({"format":"fot9"})").find("format"), std::string::npos);
  EXPECT_NE(parse_error_message(R"({"format":"fot4-km-v1","matrix":[[1]]})").find("matrix"), std::string::npos);
  EXPECT_NE(parse_error_message(R"({"format":"fot4-km-v1","frame":"lab","matrix":[]})").find("frame"),
            std::string::npos);

  json j = tensor_json(iso4());
  j["matrix"][2][4] = "x";
  EXPECT_NE(parse_error_message(j.dump()).find("matrix[2][4]"), std::string::npos);

  json c = tensor_json(iso4(), Frame::Fixed, kFormatCoeffs);
  c["coefficients"].erase("1123");
  EXPECT_NE(parse_error_message(c.dump()).find("coefficients.1123"), std::string::npos);

  json d = tensor_json(iso4(), Frame::Fixed, kFormatCoeffs);
  d["coefficients"]["2111"] = 0.0;
  EXPECT_NE(parse_error_message(d.dump()).find("coefficients.2111"), std::string::npos);
}

TEST(TensorJson, AsymmetricMatrixRejected) {
  json j = tensor_json(iso4());
  j["matrix"][0][1] = j["matrix"][0][1].get<double>() + 1e-9;
  EXPECT_NE(parse_error_message(j.dump()).find("symmetric"), std::string::npos);
  json k = tensor_json(iso4());
  k["matrix"][0][1] = k["matrix"][0][1].get<double>() + 1e-13;
  EXPECT_EQ(parse_error_message(k.dump()), "");
}

TEST(TensorJson, RedundancyViolationIsKeptRaw) {
  json j = tensor_json(iso4());
  j["matrix"][3][3] = j["matrix"][3][3].get<double>() + 1e-3;
  const TensorFile tf = parse_tensor_json(j);
  EXPECT_FALSE(check_candidate(tf.km).is_candidate);
  EXPECT_THROW(tf.tensor(), NotCompletelySymmetric);
}

TEST(Fmt17, RoundTripsDoubles) {
  oracle::Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const double v = rng.normal() * std::pow(10.0, rng.integer(-20, 20));
    EXPECT_EQ(std::stod(fmt17(v)), v);
  }
  EXPECT_EQ(fmt17(std::nan("")), "nan");
}

// fiber CSV ------------------------------------------------------------------

TEST(FiberCsv, ParsesAndWrites) {
  oracle::Rng rng(5);
  const FiberMeasure m = rng.measure(7);
  std::ostringstream out;
  write_fiber_csv(out, m);
  std::vector<std::string> warnings;
  const FiberMeasure back = parse_csv(out.str(), &warnings);
  ASSERT_EQ(back.atoms.size(), m.atoms.size());
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    EXPECT_NEAR(back.atoms[i].weight, m.atoms[i].weight, 1e-16);
    EXPECT_LE((back.atoms[i].direction.vec() - m.atoms[i].direction.vec()).norm(), 1e-15);
  }
  EXPECT_TRUE(warnings.empty());
}

TEST(FiberCsv, HeaderRequired) {
  EXPECT_THROW(parse_csv("1,1,0,0\n"), ParseError);
  EXPECT_THROW(parse_csv("w,x,y,z\n1,1,0,0\n"), ParseError);
  EXPECT_THROW(parse_csv(""), ParseError);
}

TEST(FiberCsv, CommentsAndBlankLines) {
  const FiberMeasure m = parse_csv("# data\nweight,p_x,p_y,p_z\n\n1, 0, 0, 1\r\n");
  ASSERT_EQ(m.atoms.size(), 1u);
  EXPECT_EQ(m.atoms[0].direction.vec(), Vec3::UnitZ());
}

TEST(FiberCsv, NegativeWeight) {
  EXPECT_THROW(parse_csv("weight,p_x,p_y,p_z\n1.5,1,0,0\n-0.5,0,1,0\n"), InvalidMeasure);
}

TEST(FiberCsv, EmptyMeasure) { EXPECT_THROW(parse_csv("weight,p_x,p_y,p_z\n"), EmptyMeasure); }

TEST(FiberCsv, BadCells) {
  EXPECT_THROW(parse_csv("weight,p_x,p_y,p_z\n1,1,0\n"), ParseError);
  EXPECT_THROW(parse_csv("weight,p_x,p_y,p_z\n1,1,0,zero\n"), ParseError);
  EXPECT_THROW(parse_csv("weight,p_x,p_y,p_z\n1,0,0,0\n"), ParseError);
}

TEST(FiberCsv, DirectionRenormalization) {
  std::vector<std::string> warnings;
  const FiberMeasure m = parse_csv("weight,p_x,p_y,p_z\n1,2,0,0\n", &warnings);
  EXPECT_EQ(m.atoms[0].direction.vec(), Vec3::UnitX());
  EXPECT_EQ(warnings.size(), 1u);
  warnings.clear();
  parse_csv("weight,p_x,p_y,p_z\n1,1.0000000001,0,0\n", &warnings);
  EXPECT_TRUE(warnings.empty());
}

TEST(FiberCsv, WeightNormalization) {
  std::vector<std::string> warnings;
  const FiberMeasure m = parse_csv("weight,p_x,p_y,p_z\n2,1,0,0\n2,0,1,0\n", &warnings);
  EXPECT_EQ(m.atoms[0].weight, 0.5);
  EXPECT_EQ(m.atoms[1].weight, 0.5);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("normalized"), std::string::npos);
}

// sweep CSV ------------------------------------------------------------------

TEST(SweepCsv, LayoutAndDeterminism) {
  const auto syms = std::vector<SymmetryClass>{SymmetryClass::Triclinic, SymmetryClass::Orthotropic};
  const SweepResult r = sweep(0.7, 0.3, SweepGrid::plane(5), syms, 1);
  std::ostringstream a, b;
  write_sweep_csv(a, r);
  write_sweep_csv(b, sweep(0.7, 0.3, SweepGrid::plane(5), syms, 2));
  EXPECT_EQ(a.str(), b.str());

  std::istringstream in(a.str());
  const SweepTable t = parse_sweep_csv(in);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"phi_deg", "theta_deg", "value_triclinic", "value_orthotropic"}));
  ASSERT_EQ(t.rows.size(), 5u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.rows[i][0], 22.5 * i);
    EXPECT_EQ(t.rows[i][1], 90.0);
    EXPECT_EQ(t.rows[i][2], r.nodes[i].values[0]);
    EXPECT_TRUE(std::isfinite(t.rows[i][3]));
  }
  bool has_l1 = false, has_iters = false, has_tol = false, has_grid = false;
  for (const auto& c : t.comments) {
    has_l1 = has_l1 || c == "# lambda1=0.69999999999999996";
    has_iters = has_iters || c.find("solver_iterations=") != std::string::npos;
    has_tol = has_tol || c.find("gap_tol=") != std::string::npos;
    has_grid = has_grid || c.find("grid=planar") != std::string::npos;
  }
  EXPECT_TRUE(has_l1 && has_iters && has_tol && has_grid);
}

TEST(SweepCsv, NanCells) {
  std::istringstream in("phi_deg,theta_deg,value_triclinic\n0,90,nan\n");
  const SweepTable t = parse_sweep_csv(in);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_TRUE(std::isnan(t.rows[0][2]));
}

// reports --------------------------------------------------------------------

TEST(Reports, CandidateKeys) {
  const json j = report_json(check_candidate(iso4()));
  for (const char* k : {"is_candidate", "eigenvalues", "min_eigenvalue", "clamped", "trace", "symmetry_residual"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["eigenvalues"].size(), 6u);
  EXPECT_NEAR(j["min_eigenvalue"].get<double>(), 2.0 / 15.0, 1e-14);
  EXPECT_TRUE(j["is_candidate"].get<bool>());
}

TEST(Reports, RealizationAtoms) {
  const RealizationResult r = realize(Sym4::power(Vec3::UnitY()));
  const json j = report_json(r);
  EXPECT_EQ(j["atom_count"].get<int>(), 1);
  EXPECT_TRUE(j.contains("residual"));
}
