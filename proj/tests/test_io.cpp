#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "plstab/error.hpp"
#include "plstab/experiments.hpp"
#include "plstab/io.hpp"

using namespace plstab;

namespace {

std::string parse_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "no error thrown";
  return {};
}

}  // namespace

TEST(Io, DensityRoundTrip) {
  const auto lap = laplace_density();
  const auto text = io::emit_density(lap);
  EXPECT_TRUE(io::parse_density(text) == lap);
  EXPECT_EQ(io::emit_density(io::parse_density(text)), text);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto d = random_density(seed, 6);
    EXPECT_TRUE(io::parse_density(io::emit_density(d)) == d) << seed;
  }
}

TEST(Io, CanonicalFormIsSortedWithTrailingNewline) {
  const auto text = io::emit_density(uniform_density(0, 1));
  EXPECT_EQ(text,
            "{\"knots\":[0,1],\"left_tail_slope\":null,\"logvals\":[0,0],\"normalized\":true,"
            "\"right_tail_slope\":null}\n");
}

TEST(Io, UnnormalizedInputIsNormalizedOnLoad) {
  const auto d = io::parse_density(R"({"knots":[0,2],"logvals":[1,1]})");
  EXPECT_NEAR(d.mass(), 1.0, 1e-15);
  EXPECT_NEAR(d.pdf(1.0), 0.5, 1e-15);
}

TEST(Io, ValidationErrorsNameTheField) {
  EXPECT_NE(parse_message([] { io::parse_density(R"({"knots":[1,0],"logvals":[0,0]})"); })
                .find("field 'knots'"),
            std::string::npos);
  EXPECT_NE(parse_message([] { io::parse_density(R"({"knots":[0,1]})"); }).find("logvals"),
            std::string::npos);
  EXPECT_NE(parse_message([] { io::parse_density(R"({"knots":[0,"a"],"logvals":[0,0]})"); })
                .find("knots[1]"),
            std::string::npos);
  EXPECT_NE(parse_message([] { io::parse_density(R"({"knots":[0,1],"logvals":[0,0],
      "normalized":true, "left_tail_slope": 1})"); })
                .find("field"),
            std::string::npos);
}

TEST(Io, SyntaxErrorsNameTheLine) {
  const auto msg = parse_message([] { io::parse_density("{\n\"knots\": [0,1],\n\"logvals\": [0,\n}"); });
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(Io, TripleAlphaDefaultsAndMaterializes) {
  const auto t = make_example(ExampleKind::Exa3, 0.05);
  auto text = io::emit_triple(t);
  const auto pos = text.find("\"alpha\":0.5,");
  ASSERT_NE(pos, std::string::npos);
  text.erase(pos, std::string("\"alpha\":0.5,").size());
  const auto parsed = io::parse_triple(text);
  EXPECT_EQ(parsed.alpha, 0.5);
  EXPECT_EQ(io::emit_triple(parsed), io::emit_triple(t));
  EXPECT_TRUE(parsed.m == t.m);
  EXPECT_NE(parse_message([] {
              io::parse_triple(R"({"alpha":1.5,"f":{"knots":[0,1],"logvals":[0,0]},
                "g":{"knots":[0,1],"logvals":[0,0]},"m":{"knots":[0,1],"logvals":[0,0]}})");
            }).find("alpha"),
            std::string::npos);
}

TEST(Io, HullInput) {
  const auto in = io::parse_hull_input(R"({"points":[[0,0],[1,1],[2,0]],"right_tail_slope":-1})");
  ASSERT_EQ(in.points.size(), 3u);
  EXPECT_EQ(in.points[1].log_value, 1.0);
  EXPECT_FALSE(in.left_tail_slope);
  EXPECT_EQ(*in.right_tail_slope, -1.0);
  EXPECT_EQ(io::parse_hull_input(io::emit_hull_points(in.points)).points.size(), 3u);
  EXPECT_NE(parse_message([] { io::parse_hull_input(R"({"points":[[0,0,1]]})"); }).find("points[0]"),
            std::string::npos);
}

TEST(Io, NonFiniteNumbersBecomeNull) {
  const InequalityMargin m{"x", 1.0, kInf, kInf, true};
  EXPECT_NE(io::margin_json(m).find("\"rhs\":null"), std::string::npos);
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Io, MarginsCsv) {
  const std::vector<InequalityMargin> ms{make_margin("a", 1.0, 2.0), make_margin("b", 3.0, 1.0)};
  EXPECT_EQ(io::margins_csv(ms), "label,lhs,rhs,margin,pass\na,1,2,1,true\nb,3,1,-2,false\n");
}

TEST(Io, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "plstab_io_test.json").string();
  io::write_file(path, io::emit_density(laplace_density()));
  EXPECT_TRUE(io::parse_density(io::read_file(path)) == laplace_density());
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_file(path), Error);
}
