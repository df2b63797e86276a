#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <admix/admix.hpp>

using namespace admix;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
    const auto dir = fs::temp_directory_path() /
                     ("admix-test-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

MetricsRow sample_row() {
    MetricsRow r;
    r.algo = Algorithm::Pu;
    r.p = 4;
    r.n = 8;
    r.oar = 0.96875;
    r.aar = 0.81234567;
    r.total_itrs = 4495.9;
    r.total_cds = 6400.0;
    r.total_cnots = 36000.0;
    r.total_runtime = 449.59;
    return r;
}

} // namespace

TEST(FormatFixed, FourDecimalsWithoutNegativeZero) {
    EXPECT_EQ(format_fixed(0.123456), "0.1235");
    EXPECT_EQ(format_fixed(-0.00001), "0.0000");
    EXPECT_EQ(format_fixed(-1.5), "-1.5000");
    EXPECT_EQ(format_fixed(2.0, 1), "2.0");
}

TEST(MetricsCsv, HeaderOnlyForNoRows) {
    std::ostringstream out;
    write_metrics_csv(out, {});
    EXPECT_EQ(out.str(), std::string(kMetricsCsvHeader) + "\n");
}

TEST(MetricsCsv, RowFormat) {
    auto ama = sample_row();
    ama.algo = Algorithm::Ama;
    ama.p.reset();
    std::ostringstream out;
    write_metrics_csv(out, {sample_row(), ama});
    EXPECT_EQ(out.str(), std::string(kMetricsCsvHeader) + "\n" +
                             "pu,4,8,0.9688,0.8123,4495.9000,6400.0000,36000.0000,449.5900\n"
                             "ama,,8,0.9688,0.8123,4495.9000,6400.0000,36000.0000,449.5900\n");
}

TEST(MetricsJson, RoundTrip) {
    auto ama = sample_row();
    ama.algo = Algorithm::Ama;
    ama.p.reset();
    const auto back = metrics_from_json(metrics_to_json({sample_row(), ama}));
    ASSERT_EQ(back.size(), 2U);
    EXPECT_EQ(back[0].algo, Algorithm::Pu);
    EXPECT_EQ(back[0].p, 4U);
    EXPECT_EQ(back[0].n, 8U);
    EXPECT_EQ(back[0].oar, 0.9688);
    EXPECT_EQ(back[0].aar, 0.8123);
    EXPECT_EQ(back[0].total_itrs, 4495.9);
    EXPECT_EQ(back[0].total_cnots, 36000.0);
    EXPECT_FALSE(back[1].p.has_value());
    // A second trip is exact.
    const auto again = metrics_from_json(metrics_to_json(back));
    EXPECT_EQ(again[0].aar, back[0].aar);
    EXPECT_EQ(again[1].total_runtime, back[1].total_runtime);
    EXPECT_THROW(metrics_from_json(nlohmann::json::parse(R"([{"algo":"pu"}])")), InputError);
}

TEST(SerializeResults, FilesOnDisk) {
    const auto dir = scratch_dir("serialize");
    serialize_results({sample_row()}, ResultFormat::Csv, dir / "nested" / "r.csv");
    serialize_results({sample_row()}, ResultFormat::Json, dir / "r.json");
    const auto csv = read_text_file(dir / "nested" / "r.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_EQ(load_results_json(dir / "r.json")[0].total_cds, 6400.0);
    EXPECT_THROW(read_text_file(dir / "missing.json"), IoError);
    fs::remove_all(dir);
}

TEST(SerializeResults, CampaignRowCount) {
    ExperimentConfig cfg;
    cfg.sizes = {4, 6};
    cfg.graphs_per_size = 1;
    cfg.runs_per_setting = 1;
    cfg.algorithms = {Algorithm::QaoaPlus, Algorithm::Pu, Algorithm::Pnu};
    cfg.depths = {1, 2};
    cfg.optimizer.max_iters = 3;
    std::ostringstream out;
    write_metrics_csv(out, run_campaign(cfg));
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3 * 2 * 2);
}

TEST(PlotData, SeriesAndFiles) {
    auto ama = sample_row();
    ama.algo = Algorithm::Ama;
    ama.p.reset();
    const auto data = metrics_plot_data({sample_row(), ama});
    ASSERT_EQ(data.size(), 6U);
    ASSERT_EQ(data.at("aar").size(), 2U);
    EXPECT_EQ(data.at("aar")[0].series, "pu-p4");
    EXPECT_EQ(data.at("aar")[1].series, "ama");
    EXPECT_EQ(data.at("cnots")[0].y, 36000.0);

    const auto dir = scratch_dir("plot");
    write_plot_data(data, dir / "plotdata");
    EXPECT_EQ(read_text_file(dir / "plotdata" / "oar.csv"),
              "series,x,y\npu-p4,8.0000,0.9688\nama,8.0000,0.9688\n");
    fs::remove_all(dir);
}

TEST(OarCostCsv, Format) {
    OarCostRow row;
    row.algo = Algorithm::Pnu;
    row.n = 8;
    row.target_oar = 0.95;
    row.min_depth = 2.5;
    row.t_avg = 4.0;
    row.graphs_reached = 9;
    row.graphs_total = 10;
    row.unreached = true;
    std::ostringstream out;
    write_oar_cost_csv(out, {row});
    EXPECT_EQ(out.str(), std::string(kOarCostCsvHeader) + "\n" +
                             "pnu,8,0.9500,2.5000,4.0000,0.0000,0.0000,0.0000,0.0000,9,10,true\n");
    const auto data = oar_cost_plot_data({row});
    EXPECT_EQ(data.count("oarcost-n8-itrs"), 1U);
}

TEST(Trace, JsonLinesPerSelection) {
    const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
    const auto out = run_ama(g, AmaConfig{}, 2);
    std::ostringstream log;
    write_trace_log(log, out.trace);
    std::size_t rounds = 0;
    for (const auto &step : out.trace.steps) {
        rounds += step.rounds.size();
    }
    const auto text = log.str();
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), rounds);
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("f_gra"));
        EXPECT_DOUBLE_EQ(j["score"].get<double>(),
                         0.5 * j["f_fun"].get<double>() + 0.5 * j["f_gra"].get<double>());
    }
    const auto j = trace_to_json(out.trace);
    EXPECT_EQ(j["steps"].size(), out.trace.steps.size());
}
