#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkmeans/clustering.hpp"
#include "qkmeans/crosstalk.hpp"
#include "qkmeans/error.hpp"
#include "qkmeans/iqdata.hpp"
#include "qkmeans/metrics.hpp"

using namespace qkm;

namespace {

ReadoutModel null_model() {
    auto m = default_readout_model();
    m.crosstalk.clear();
    return m;
}

CouplingMap single_edge(std::size_t a, std::size_t b) {
    auto c = default_coupling_map();
    c.edges = {{a, b}};
    return c;
}

} // namespace

TEST(Schedule, BitConvention) {
    const QubitPair p{1, 2};
    const auto s = Schedule::parse("10");
    EXPECT_EQ(s.bit_of(p, 1), 0);
    EXPECT_EQ(s.bit_of(p, 2), 1);
    EXPECT_EQ(Schedule::with(p, 1, 0, 1).text(), "10");
    EXPECT_EQ(Schedule::with(p, 2, 0, 1).text(), "01");
    EXPECT_EQ(QubitPair::parse("3-4"), (QubitPair{3, 4}));
    EXPECT_EQ((QubitPair{3, 4}).label(), "3-4");
    EXPECT_THROW((void)Schedule::parse("2"), DataError);
    EXPECT_THROW((void)QubitPair::parse("1-1"), DataError);
}

TEST(Synthesize, RowCounts) {
    const auto t = synthesize(default_readout_model(), default_coupling_map(), 1024, 7);
    EXPECT_EQ(t.pairs().size(), 4u);
    EXPECT_EQ(t.size(), 4u * 2 * 4 * 1024);
    for (const auto& p : t.pairs()) {
        for (auto s : kAllSchedules) {
            EXPECT_EQ(t.shots(p, p.first, s).size(), 1024u);
            EXPECT_EQ(t.shots(p, p.second, s).size(), 1024u);
        }
    }
}

TEST(Synthesize, Deterministic) {
    const auto a = synthesize(default_readout_model(), default_coupling_map(), 64, 3);
    const auto b = synthesize(default_readout_model(), default_coupling_map(), 64, 3);
    const auto c = synthesize(default_readout_model(), default_coupling_map(), 64, 4);
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(a == c);
    std::ostringstream sa, sb;
    write_table(a, sa);
    write_table(b, sb);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Synthesize, ShotCloudsSitAtModelCenters) {
    const auto model = null_model();
    const auto t = synthesize(model, single_edge(0, 1), 4096, 9);
    const QubitPair p{0, 1};
    for (std::size_t q : {0u, 1u}) {
        for (int own : {0, 1}) {
            const auto shots = t.shots(p, q, Schedule::with(p, q, own, 0));
            double mi = 0, mq = 0;
            for (const auto& s : shots) {
                mi += s.i / shots.size();
                mq += s.q / shots.size();
            }
            const auto& c = own ? model.qubits[q].excited : model.qubits[q].ground;
            EXPECT_NEAR(mi, c.i, 0.06);
            EXPECT_NEAR(mq, c.q, 0.06);
        }
    }
}

TEST(Synthesize, NullModelCrossQubitIndependence) {
    const QubitPair p{1, 2};
    const auto t = synthesize(null_model(), single_edge(1, 2), 1024, 7);
    const auto r = analyze_pair(t, p);
    // Arrays alternate qubit 1 / qubit 2 in pairs of (real, imag).
    for (std::size_t a = 0; a < kArrayCount; ++a) {
        for (std::size_t b = 0; b < kArrayCount; ++b) {
            if ((a / 2) % 2 == (b / 2) % 2) continue;
            ASSERT_TRUE(r.at(a, b).has_value());
            EXPECT_LT(std::abs(*r.at(a, b)), 0.05) << r.labels[a] << " vs " << r.labels[b];
        }
    }
}

TEST(Synthesize, InjectedCouplingReachesTableScale) {
    const auto t = synthesize(default_readout_model(), default_coupling_map(), 1024, 7);
    const auto r = analyze_pair(t, {1, 2});
    ASSERT_TRUE(r.max_named_abs().has_value());
    EXPECT_GE(*r.max_named_abs(), 0.1);
}

TEST(Synthesize, RejectsUncoveredPair) {
    auto m = default_readout_model();
    m.qubits.resize(3);
    EXPECT_THROW((void)synthesize(m, default_coupling_map(), 8, 1), DataError);
    auto bad = default_readout_model();
    bad.crosstalk[{0, 1}] = 1.5;
    EXPECT_THROW(bad.validate(), DataError);
}

TEST(Assemble, SizesAndLabels) {
    const auto t = synthesize(default_readout_model(), default_coupling_map(), 1024, 7);
    const QubitPair p{1, 2};
    const auto d = assemble_datasets(t, 1, p);
    EXPECT_EQ(d.single.size(), 2048u);
    EXPECT_EQ(d.both.size(), 4096u);
    auto count = [](const DataSet& s, int label) {
        return std::count(s.labels().begin(), s.labels().end(), label);
    };
    EXPECT_EQ(count(d.single, 0), 1024);
    EXPECT_EQ(count(d.single, 1), 1024);
    EXPECT_EQ(count(d.both, 0), 2048);
    EXPECT_EQ(count(d.both, 1), 2048);
    for (double v : d.single.values()) EXPECT_GT(v, 0.0);
    for (double v : d.both.values()) EXPECT_GT(v, 0.0);
}

TEST(Assemble, LabelIsOwnBit) {
    // Build a table where each shot's I value encodes its schedule so the
    // label of every assembled row can be traced back.
    IQShotTable t;
    const QubitPair p{1, 2};
    for (auto s : kAllSchedules) {
        for (std::size_t q : {1u, 2u}) {
            for (std::size_t shot = 0; shot < 3; ++shot) {
                t.add({p, q, s, shot, static_cast<double>(s.bits), static_cast<double>(shot)});
            }
        }
    }
    const auto d = assemble_datasets(t, 1, p);
    const auto raw_labels = d.both.labels();
    ASSERT_EQ(raw_labels.size(), 12u);
    // Invert the recorded transform to recover each row's schedule bits.
    const auto& tr = d.both_transform;
    for (std::size_t i = 0; i < d.both.size(); ++i) {
        const auto y = d.both.row(i);
        double x0 = 0.0;
        for (std::size_t r = 0; r < 2; ++r) x0 += tr.rotation[r * 2 + 0] * (y[r] - tr.offset) * tr.scale;
        const auto bits = static_cast<int>(std::lround(x0 + tr.mean[0]));
        EXPECT_EQ(raw_labels[i], Schedule{static_cast<std::uint8_t>(bits)}.bit_of(p, 1));
    }
    // Schedule "10" has qubit 1 in ground while its partner is excited.
    EXPECT_EQ(Schedule::parse("10").bit_of(p, 1), 0);
}

TEST(Assemble, MissingSchedule) {
    IQShotTable t;
    t.add({{0, 1}, 0, Schedule::parse("00"), 0, 1.0, 2.0});
    EXPECT_THROW((void)assemble_datasets(t, 0, {0, 1}), DataError);
}

TEST(TableIo, RoundTripFullPrecision) {
    const auto t = synthesize(default_readout_model(), default_coupling_map(), 32, 11);
    std::stringstream s;
    write_table(t, s);
    const auto back = read_table(s);
    EXPECT_TRUE(back == t);
    const auto path = std::filesystem::temp_directory_path() / "qkm_roundtrip.csv";
    save_table(t, path);
    EXPECT_TRUE(load_table(path) == t);
    std::filesystem::remove(path);
}

TEST(TableIo, RejectsNaNWithLineNumber) {
    std::stringstream s("pair,qubit,schedule,shot,i,q\n0-1,0,00,0,1.0,2.0\n0-1,0,00,1,nan,2.0\n");
    try {
        (void)read_table(s);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(TableIo, RejectsMalformedAndDuplicates) {
    std::stringstream dup("pair,qubit,schedule,shot,i,q\n0-1,0,00,0,1,2\n0-1,0,00,0,3,4\n");
    EXPECT_THROW((void)read_table(dup), DataError);
    std::stringstream shortrow("pair,qubit,schedule,shot,i,q\n0-1,0,00,0,1\n");
    EXPECT_THROW((void)read_table(shortrow), DataError);
    std::stringstream header("a,b,c\n");
    EXPECT_THROW((void)read_table(header), DataError);
    std::stringstream outside("pair,qubit,schedule,shot,i,q\n0-1,3,00,0,1,2\n");
    EXPECT_THROW((void)read_table(outside), DataError);
}

TEST(TableIo, EmptyFileIsEmptyTable) {
    std::stringstream s("");
    const auto t = read_table(s);
    EXPECT_TRUE(t.empty());
}

TEST(TableIo, FiveColumnFormAcceptedForOnePair) {
    std::stringstream s("qubit,schedule,shot,i,q\n3,00,0,1,2\n4,00,0,3,4\n");
    const auto t = read_table(s);
    ASSERT_EQ(t.pairs().size(), 1u);
    EXPECT_EQ(t.pairs()[0], (QubitPair{3, 4}));
}

TEST(ConfigIo, ShippedConfigsMatchDefaults) {
    const std::filesystem::path dir = QKM_SOURCE_DIR "/config";
    const auto m = load_readout_model(dir / "readout_default.cfg");
    const auto d = default_readout_model();
    ASSERT_EQ(m.qubits.size(), d.qubits.size());
    for (std::size_t q = 0; q < d.qubits.size(); ++q) {
        EXPECT_EQ(m.qubits[q].ground.i, d.qubits[q].ground.i);
        EXPECT_EQ(m.qubits[q].excited.q, d.qubits[q].excited.q);
    }
    EXPECT_EQ(m.crosstalk, d.crosstalk);
    const auto c = load_coupling_map(dir / "coupling_5q_linear.cfg");
    EXPECT_EQ(c.edges, default_coupling_map().edges);
    EXPECT_TRUE(load_readout_model(dir / "readout_null.cfg").crosstalk.empty());
}

TEST(ConfigIo, RoundTripAndErrors) {
    std::stringstream s;
    write_readout_model(default_readout_model(), s);
    const auto m = parse_readout_model(s);
    EXPECT_EQ(m.crosstalk, default_readout_model().crosstalk);
    std::stringstream c;
    write_coupling_map(default_coupling_map(), c);
    EXPECT_EQ(parse_coupling_map(c).edges, default_coupling_map().edges);

    std::stringstream bad("qubit.0.ground = 1\n");
    EXPECT_THROW((void)parse_readout_model(bad), DataError);
    std::stringstream unknown("device = x\nbogus = 1\n");
    EXPECT_THROW((void)parse_readout_model(unknown), DataError);
    std::stringstream edge("qubits = 2\nedge = 0, 5\n");
    EXPECT_THROW((void)parse_coupling_map(edge), DataError);
}

TEST(IqDataProperty, SeparabilityIncreasesAsNoiseShrinks) {
    double previous = 0.0;
    for (double sd : {1.6, 1.0, 0.6}) {
        auto m = null_model();
        for (auto& q : m.qubits) q.stddev_i = q.stddev_q = sd;
        const auto t = synthesize(m, single_edge(0, 1), 1024, 21);
        const auto d = assemble_datasets(t, 0, {0, 1});
        const auto fitted = classical_kmeans_oracle(d.single, 2, 4);
        const double f = assignment_fidelity(fitted.labels, d.single.labels());
        EXPECT_GT(f, previous) << sd;
        previous = f;
    }
}

// Stated property: with no injected coupling, all eight named coefficients of
// a pair stay below 0.05 at 1024 shots in at least 95% of seeds.
TEST(IqDataProperty, NullModelNamedCoefficientsBelowFiveHundredths) {
    const int seeds = 200;
    int clean = 0;
    for (int s = 1; s <= seeds; ++s) {
        const auto t = synthesize(null_model(), single_edge(0, 1), 1024, static_cast<std::uint64_t>(s));
        const auto r = analyze_pair(t, {0, 1});
        if (*r.max_named_abs() < 0.05) ++clean;
    }
    const double rate = static_cast<double>(clean) / seeds;
    RecordProperty("clean_rate", std::to_string(rate));
    EXPECT_GE(rate, 0.95) << "fraction of null seeds with every named |r| < 0.05: " << rate;
}
