#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "calband/io.hpp"
#include "oracles.hpp"

using namespace calband;

namespace {

PredictionTable parse(const std::string& text, bool unit_domain = true) {
  std::istringstream in(text);
  return read_predictions(in, unit_domain);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(ReadPredictions, BasicAndColumnOrder) {
  const auto t = parse("outcome,prediction\n1,0.25\n0,0.75\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].x, 0.25);
  EXPECT_EQ(t.rows[0].y, 1);
  EXPECT_TRUE(t.warnings.empty());
}

TEST(ReadPredictions, CommentsAndExtraColumns) {
  const auto t = parse("# produced by a model\nid,prediction,outcome\na,0.1,0\n\nb,0.9,1\n");
  EXPECT_EQ(t.rows.size(), 2u);
  ASSERT_EQ(t.warnings.size(), 1u);
  EXPECT_NE(t.warnings[0].find("id"), std::string::npos);
}

TEST(ReadPredictions, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("prediction,outcome\n0.1,0\n0.2,2\n"), 3u);
  EXPECT_EQ(error_line("prediction,outcome\n0.1,0\nabc,1\n"), 3u);
  EXPECT_EQ(error_line("prediction,outcome\n0.1\n"), 2u);
  EXPECT_EQ(error_line("pred,y\n0.1,1\n"), 1u);
  EXPECT_EQ(error_line("prediction,outcome\n1.5,1\n"), 2u);
  EXPECT_EQ(error_line("prediction,outcome\n0.5,1.0\n"), 2u);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("prediction,outcome\n"), ParseError);
  try {
    parse("prediction,outcome\n0.1,0\n0.2,2\n");
  } catch (const ParseError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 3: ", 0), 0u);
  }
}

TEST(ReadPredictions, GeneralCovariates) {
  const auto t = parse("prediction,outcome\n-3.5,1\n12,0\n", false);
  EXPECT_EQ(t.rows[0].x, -3.5);
  try {
    parse("prediction,outcome\n-3.5,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("--general-covariates"), std::string::npos);
  }
  EXPECT_THROW(read_predictions_file("/nonexistent/input.csv"), IoError);
}

TEST(BandCsv, RoundTripIsExact) {
  std::mt19937_64 rng(71);
  const auto data = build_sorted_data(oracle::random_observations(rng, 150, true, [](double x) { return x * x; }));
  AnalysisOptions options;
  const auto result = analyze(data, options);
  std::ostringstream out;
  write_band_csv(out, result.band, result.fit, {{"input", "sample.csv"}, {"alpha", "0.05"}});
  EXPECT_EQ(out.str().rfind("# input=sample.csv\n# alpha=0.05\nx,lower,upper,isotonic_fit\n", 0), 0u);
  std::istringstream in(out.str());
  const auto table = read_band_csv(in);
  ASSERT_EQ(table.band.size(), result.band.size());
  for (std::size_t g = 0; g < result.band.size(); ++g) {
    const double x = result.data.knot(g);
    EXPECT_EQ(table.band.knots[g], x);
    EXPECT_EQ(evaluate_band(table.band, x).lower, evaluate_band(result.band, x).lower);
    EXPECT_EQ(evaluate_band(table.band, x).upper, evaluate_band(result.band, x).upper);
    EXPECT_EQ(table.isotonic_fit[g], result.fit.level_at_group(g));
  }
}

TEST(BandCsv, RejectsMalformed) {
  std::istringstream bad_header("a,b,c,d\n");
  EXPECT_THROW(read_band_csv(bad_header), ParseError);
  std::istringstream short_row("x,lower,upper,isotonic_fit\n0.1,0,1\n");
  EXPECT_THROW(read_band_csv(short_row), ParseError);
}

TEST(Config, KeyValues) {
  std::istringstream in("# experiment\nfamily = wave\ns=0.9\nn=2048\nK=full\nreps=3\nseed=11\nmethod=yb\n");
  const auto config = experiment_config_from(read_key_values(in));
  EXPECT_EQ(config.family, FamilyKind::wave);
  EXPECT_EQ(config.shape, 0.9);
  EXPECT_EQ(config.n, 2048u);
  EXPECT_EQ(config.grid, 0);
  EXPECT_EQ(config.reps, 3u);
  EXPECT_EQ(config.seed, 11u);
  EXPECT_EQ(config.method, BandMethod::yang_barber);
}

TEST(Config, Errors) {
  std::istringstream dup("n=1\nn=2\n");
  EXPECT_THROW(read_key_values(dup), ParseError);
  std::istringstream noeq("n 5\n");
  EXPECT_THROW(read_key_values(noeq), ParseError);
  EXPECT_THROW(experiment_config_from({{"colour", "red"}}), ParseError);
  EXPECT_THROW(experiment_config_from({{"n", "many"}}), ParseError);
  EXPECT_THROW(experiment_config_from({{"family", "linear"}}), ParseError);
}

TEST(ReportJson, Fields) {
  const std::vector<double> x = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  const std::vector<int> y = {0, 0, 1, 0, 0, 1, 1, 0, 1, 1};
  const auto result = analyze(build_sorted_data(x, y), AnalysisOptions{});
  const auto doc = report_json(result, {{"input", "ten.csv"}});
  EXPECT_EQ(doc["band"]["method"], "nc");
  EXPECT_EQ(doc["band"]["x"].size(), 10u);
  EXPECT_TRUE(doc["verdict"].contains("epsilon_certificate"));
  EXPECT_TRUE(doc["isotonicity"].contains("p_value"));
  EXPECT_EQ(doc["meta"]["input"], "ten.csv");
  EXPECT_EQ(doc["meta"]["n"], 10);
  EXPECT_EQ(doc["band"]["upper"][3].get<double>(), result.band.upper[3]);
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(input_label("/a/b/c.csv"), "c.csv");
}

TEST(Svg, ProducesDocument) {
  const auto result = analyze(build_sorted_data(std::vector<double>{0.2, 0.4, 0.6}, std::vector<int>{0, 1, 1}),
                              AnalysisOptions{});
  const auto svg = render_svg(result, SvgOptions{});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
