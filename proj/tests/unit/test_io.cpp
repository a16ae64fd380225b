#include <sstream>

#include <gtest/gtest.h>

#include "depfdr/io.hpp"

using namespace depfdr;

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(-0.0), "0");
  EXPECT_EQ(io::format_double(std::nan("")), "NA");
  EXPECT_EQ(io::format_double(1e-300), "1e-300");
  Rng rng(4);
  for (int i = 0; i < 10000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    ASSERT_EQ(io::parse_double(io::format_double(v)), v);
  }
}

TEST(Parse, NumbersAndDims) {
  EXPECT_EQ(io::parse_unsigned("0x5EEDF00D"), kDefaultMasterSeed);
  EXPECT_EQ(io::parse_unsigned("42"), 42u);
  EXPECT_THROW(io::parse_unsigned("-1"), io::FormatError);
  EXPECT_THROW(io::parse_unsigned(""), io::FormatError);
  EXPECT_THROW(io::parse_double("1.5x"), io::FormatError);
  EXPECT_EQ(io::parse_dims("50x40"), (std::vector<std::size_t>{50, 40}));
  EXPECT_THROW(io::parse_dims("0x4"), io::FormatError);
  EXPECT_EQ(io::split(" a, b ,c", ','), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(FieldCsv, RoundTrip) {
  const auto f = gen_iid(0.4, {6, 7}, 2);
  std::stringstream ss;
  io::write_field_csv(ss, f);
  EXPECT_TRUE(ss.str().starts_with("dims=6x7\n"));
  EXPECT_EQ(io::read_field_csv(ss), f);
  std::stringstream bad("dims=2\n0\n2\n");
  EXPECT_THROW(io::read_field_csv(bad), io::FormatError);
  std::stringstream short_file("dims=3\n0\n1\n");
  EXPECT_THROW(io::read_field_csv(short_file), io::FormatError);
}

TEST(SampleCsv, RoundTripWithAndWithoutTruth) {
  const auto f = gen_iid(0.5, {300}, 7);
  const auto s = generate_pvalues(f, AlternativeDistribution::paper(1.0 / 98.0), 8);
  std::stringstream ss;
  io::write_sample_csv(ss, s);
  const auto back = io::read_sample_csv(ss);
  EXPECT_EQ(back.pvalues(), s.pvalues());
  EXPECT_EQ(back.truth(), s.truth());

  std::stringstream bare("x\n0.5\n0.25\n");
  const auto b = io::read_sample_csv(bare);
  EXPECT_FALSE(b.has_truth());
  std::stringstream out;
  io::write_sample_csv(out, b);
  EXPECT_EQ(out.str(), "x\n0.5\n0.25\n");

  std::stringstream swapped("x,h\n0.5,1\n");
  EXPECT_EQ(io::read_sample_csv(swapped).truth()[0], 1);
  std::stringstream ragged("h,x\n1\n");
  EXPECT_THROW(io::read_sample_csv(ragged), io::FormatError);
  std::stringstream unknown("h,y\n1,0.5\n");
  EXPECT_THROW(io::read_sample_csv(unknown), io::FormatError);
}

TEST(ResultCsv, RowLayout) {
  const PValueSample s(std::vector<double>{0.01, 0.02, 0.30, 0.40, 0.90});
  const auto r = bh_procedure(s, {0.1});
  EXPECT_EQ(io::result_row("run", r), "run,bh,5,0.1,2,NA,NA,NA,0.04,1,1,0.02\n");
  EXPECT_EQ(std::string(io::kResultHeader), "run_id,procedure,n,alpha,R,V,FDP,FNP,nu,pi0_hat_raw,pi0_hat,threshold\n");
}
