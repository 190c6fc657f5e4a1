#include <doctest/doctest.h>

#include <random>
#include <string>
#include <vector>

#include "hilbench/error.hpp"
#include "hilbench/timeseries.hpp"

using namespace hilbench;

namespace {

SerialFormat unlabeled(double period = 0.1) {
    SerialFormat fmt;
    fmt.kind = SerialKind::UnlabeledLines;
    fmt.sample_period = period;
    return fmt;
}

SerialFormat labeled(std::vector<std::string> labels, double period = 0.1) {
    SerialFormat fmt;
    fmt.kind = SerialKind::LabeledLines;
    fmt.labels = std::move(labels);
    fmt.sample_period = period;
    return fmt;
}

}  // namespace

TEST_CASE("unlabeled lines parse into one channel with grid timestamps") {
    Trace trace = parse_serial("233\n512\n-3\n", unlabeled(0.5));
    REQUIRE(trace.channels.size() == 1);
    const Channel& ch = trace.channels[0];
    REQUIRE(ch.samples.size() == 3);
    CHECK(ch.samples[0].value == 233.0);
    CHECK(ch.samples[1].value == 512.0);
    CHECK(ch.samples[2].value == -3.0);
    CHECK(ch.samples[0].t == 0.0);
    CHECK(ch.samples[1].t == 0.5);
    CHECK(ch.samples[2].t == 1.0);
    CHECK(trace.meta.at("skipped_lines") == "0");
    CHECK(trace.meta.at("total_lines") == "3");
}

TEST_CASE("labeled lines parse case-sensitively into their channels") {
    const char* text =
        "A_X = -0.4261\n"
        "A_Y = 0.0003\n"
        "A_X = -0.4259\n"
        "A_Y = 0.0011\n";
    Trace trace = parse_serial(text, labeled({"A_X", "A_Y"}));
    REQUIRE(trace.channels.size() == 2);
    const Channel* x = trace.find_channel("A_X");
    const Channel* y = trace.find_channel("A_Y");
    REQUIRE(x);
    REQUIRE(y);
    CHECK(x->samples.size() == 2);
    CHECK(y->samples.size() == 2);
    CHECK(x->samples[1].value == -0.4259);
    CHECK(y->samples[0].value == 0.0003);
    CHECK(trace.find_channel("a_x") == nullptr);
}

TEST_CASE("malformed lines are skipped and counted, not fatal") {
    const char* text =
        "233\n"
        "boot: ADXL online\n"
        "512\n"
        "\n"
        "nan\n"
        "128\n";
    Trace trace = parse_serial(text, unlabeled());
    REQUIRE(trace.channels.size() == 1);
    CHECK(trace.channels[0].samples.size() == 3);
    CHECK(trace.meta.at("skipped_lines") == "3");
    CHECK(trace.meta.at("total_lines") == "6");
}

TEST_CASE("mislabeled and unknown-label lines are skipped") {
    const char* text =
        "A_X = 1.0\n"
        "a_x = 2.0\n"
        "A_Z = 3.0\n"
        "A_X = 1e5\n"
        "A_X = 4.0\n";
    Trace trace = parse_serial(text, labeled({"A_X"}));
    CHECK(trace.channels[0].samples.size() == 2);
    CHECK(trace.meta.at("skipped_lines") == "3");
}

TEST_CASE("carriage returns are tolerated") {
    Trace trace = parse_serial("1\r\n2\r\n", unlabeled());
    CHECK(trace.channels[0].samples.size() == 2);
    CHECK(trace.channels[0].samples[1].value == 2.0);
}

TEST_CASE("a capture with nothing parseable raises NoSamples") {
    try {
        parse_serial("", unlabeled());
        FAIL("expected NoSamples");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoSamples);
    }
    CHECK_THROWS_AS(parse_serial("garbage\nmore garbage\n", unlabeled()), Error);
    try {
        parse_serial("junk\n", unlabeled());
        FAIL("expected NoSamples");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoSamples);
    }
}

TEST_CASE("labeled channels out of balance raise ChannelImbalance") {
    const char* text =
        "A = 1\n"
        "A = 2\n"
        "A = 3\n"
        "B = 1\n";
    try {
        parse_serial(text, labeled({"A", "B"}));
        FAIL("expected ChannelImbalance");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ChannelImbalance);
    }
}

TEST_CASE("a one-line imbalance is truncated to the shorter channel") {
    const char* text =
        "A = 1\n"
        "B = 10\n"
        "A = 2\n";
    Trace trace = parse_serial(text, labeled({"A", "B"}));
    CHECK(trace.find_channel("A")->samples.size() == 1);
    CHECK(trace.find_channel("B")->samples.size() == 1);
}

TEST_CASE("format then parse is the identity on labels and values") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> value(-500.0, 500.0);
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> nch(1, 4);
    std::uniform_int_distribution<int> scale_pick(0, 3);
    const double scales[] = {1.0, 1e-4, 1e3, 1e-8};

    for (int iter = 0; iter < 1000; ++iter) {
        const bool use_labels = iter % 2 == 1;
        SerialFormat fmt = use_labels ? labeled({}) : unlabeled();
        Trace original;
        const int channels = use_labels ? nch(rng) : 1;
        const int n = len(rng);
        for (int c = 0; c < channels; ++c) {
            Channel ch;
            ch.label = use_labels ? "ch" + std::to_string(c) : "";
            if (use_labels) fmt.labels.push_back(ch.label);
            for (int i = 0; i < n; ++i) {
                ch.samples.push_back(
                    {i * fmt.sample_period, value(rng) * scales[scale_pick(rng)]});
            }
            original.channels.push_back(std::move(ch));
        }
        Trace back = parse_serial(format_serial(original, fmt), fmt);
        REQUIRE(back.channels.size() == original.channels.size());
        for (std::size_t c = 0; c < original.channels.size(); ++c) {
            CHECK(back.channels[c].label == original.channels[c].label);
            REQUIRE(back.channels[c].samples.size() == original.channels[c].samples.size());
            for (std::size_t i = 0; i < original.channels[c].samples.size(); ++i) {
                CHECK(back.channels[c].samples[i].value == original.channels[c].samples[i].value);
            }
        }
    }
}

TEST_CASE("labeled formatting interleaves by sample index") {
    Trace trace;
    Channel a{"A", {{0.0, 1.0}, {0.1, 2.0}}};
    Channel b{"B", {{0.0, 10.0}, {0.1, 20.0}}};
    trace.channels = {a, b};
    CHECK(format_serial(trace, labeled({"A", "B"})) ==
          "A = 1\nB = 10\nA = 2\nB = 20\n");
}

TEST_CASE("formatting an unlabeled trace requires exactly one channel") {
    Trace two;
    two.channels = {Channel{"A", {{0, 1}}}, Channel{"B", {{0, 1}}}};
    try {
        format_serial(two, unlabeled());
        FAIL("expected LabelMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::LabelMismatch);
    }
}

TEST_CASE("window keeps the half-open time range") {
    Trace trace = parse_serial("0\n1\n2\n3\n4\n", unlabeled(1.0));
    Trace cut = window(trace, 1.0, 3.0);
    REQUIRE(cut.channels.size() == 1);
    REQUIRE(cut.channels[0].samples.size() == 2);
    CHECK(cut.channels[0].samples[0].value == 1.0);
    CHECK(cut.channels[0].samples[1].value == 2.0);
}

TEST_CASE("window rejects inverted ranges and empty results") {
    Trace trace = parse_serial("0\n1\n", unlabeled(1.0));
    try {
        window(trace, 2.0, 1.0);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidArgument);
    }
    try {
        window(trace, 10.0, 11.0);
        FAIL("expected EmptyWindow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyWindow);
    }
}
