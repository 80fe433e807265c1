#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sea/elman.hpp"
#include "sea/rng.hpp"

using namespace sea;

namespace {

// 1 layer, 1 node, input_dim 1; parameters [w_in, w_ctx, bias, w_out, b_out].
ElmanNetwork tiny_network(double w_in, double w_ctx, double bias, double w_out, double b_out) {
    ElmanConfig cfg;
    cfg.num_hidden_layers = 1;
    cfg.hidden_nodes_per_layer = 1;
    cfg.input_dim = 1;
    ElmanNetwork net(cfg);
    REQUIRE(net.parameter_count() == 5);
    net.set_parameter(0, w_in);
    net.set_parameter(1, w_ctx);
    net.set_parameter(2, bias);
    net.set_parameter(3, w_out);
    net.set_parameter(4, b_out);
    return net;
}

ElmanNetwork zeroed(ElmanConfig cfg, double b_out) {
    ElmanNetwork net(cfg);
    for (std::size_t i = 0; i < net.parameter_count(); ++i) net.set_parameter(i, 0.0);
    net.set_parameter(net.parameter_count() - 1, b_out);
    return net;
}

SupervisedSequence random_sequence(int n, int input_dim, std::uint64_t seed) {
    Rng rng(seed);
    SupervisedSequence seq;
    for (int t = 0; t < n; ++t) {
        std::vector<double> in(input_dim);
        for (auto& x : in) x = rng.uniform(-1.0, 1.0);
        seq.inputs.push_back(std::move(in));
        seq.targets.push_back(rng.uniform(-1.0, 1.0));
    }
    return seq;
}

} // namespace

TEST_CASE("config validation") {
    ElmanConfig cfg;
    cfg.num_hidden_layers = 0;
    CHECK_THROWS_AS(ElmanNetwork{cfg}, ConfigError);
    cfg = ElmanConfig{};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(ElmanNetwork{cfg}, ConfigError);
    cfg = ElmanConfig{};
    cfg.bptt_depth = 0;
    CHECK_THROWS_AS(ElmanNetwork{cfg}, ConfigError);
}

TEST_CASE("build_supervised assembles lagged inputs plus weather") {
    const TimeSeries comp(HourStamp(0), {1.0, 2.0, 3.0, 4.0, 5.0}, "c");
    const std::vector<ExogenousRecord> exo(5);
    const SupervisedSequence seq = build_supervised(comp, exo, 4);
    REQUIRE(seq.size() == 1);
    const std::vector<double> expected = {4.0, 3.0, 2.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(seq.inputs[0] == expected);
    CHECK(seq.targets[0] == 5.0);

    const TimeSeries too_short(HourStamp(0), {1.0, 2.0, 3.0, 4.0}, "c");
    CHECK_THROWS_AS(build_supervised(too_short, std::vector<ExogenousRecord>(4), 4), TooShort);

    std::vector<double> long_comp(104);
    for (std::size_t i = 0; i < long_comp.size(); ++i) long_comp[i] = static_cast<double>(i);
    const SupervisedSequence long_seq = build_supervised(
        TimeSeries(HourStamp(0), long_comp, "c"), std::vector<ExogenousRecord>(104), 4);
    CHECK(long_seq.size() == 100);

    CHECK_THROWS_AS(build_supervised(comp, std::vector<ExogenousRecord>(4), 2), LengthMismatch);
}

TEST_CASE("forward matches hand-evaluated tiny networks") {
    SUBCASE("zero network outputs the output bias") {
        ElmanConfig cfg;
        cfg.num_hidden_layers = 2;
        cfg.hidden_nodes_per_layer = 3;
        cfg.input_dim = 4;
        const ElmanNetwork net = zeroed(cfg, 0.7);
        ContextState state = ContextState::zeros(cfg);
        CHECK(net.forward({1.0, -2.0, 3.0, 0.5}, state) == 0.7);
        CHECK(net.forward({0.0, 0.0, 0.0, 0.0}, state) == 0.7);
    }

    SUBCASE("single path evaluates tanh(x)") {
        const ElmanNetwork net = tiny_network(1.0, 0.0, 0.0, 1.0, 0.0);
        ContextState state = ContextState::zeros(net.config());
        const double x = 0.83;
        CHECK(net.forward({x}, state) == doctest::Approx(std::tanh(x)).epsilon(1e-15));
        CHECK(state.h[0] == doctest::Approx(std::tanh(x)).epsilon(1e-15));
    }

    SUBCASE("context feedback composes tanh across steps") {
        const ElmanNetwork net = tiny_network(1.0, 1.0, 0.0, 1.0, 0.0);
        ContextState state = ContextState::zeros(net.config());
        const double x = 0.83;
        CHECK(net.forward({x}, state) == doctest::Approx(std::tanh(x)).epsilon(1e-15));
        const double second = net.forward({0.0}, state);
        CHECK(second == doctest::Approx(std::tanh(std::tanh(x))).epsilon(1e-15));
    }

    SUBCASE("input dimension is checked") {
        const ElmanNetwork net = tiny_network(1.0, 0.0, 0.0, 1.0, 0.0);
        ContextState state = ContextState::zeros(net.config());
        CHECK_THROWS_AS(net.forward({1.0, 2.0}, state), DimensionMismatch);
    }
}

TEST_CASE("predict_sequence resets context and is order sensitive") {
    const ElmanNetwork net = tiny_network(0.9, 0.8, 0.0, 1.0, 0.0);
    const std::vector<std::vector<double>> inputs = {{0.5}, {-0.3}, {0.9}};

    const auto once = net.predict_sequence(inputs);
    const auto twice = net.predict_sequence(inputs);
    CHECK(once == twice); // no state leaks across calls

    ContextState state = ContextState::zeros(net.config());
    CHECK(once[0] == net.forward({0.5}, state));

    auto permuted = inputs;
    std::swap(permuted[0], permuted[2]);
    const auto shuffled = net.predict_sequence(permuted);
    CHECK(shuffled[1] != once[1]); // recurrent state carries order

    const ElmanNetwork zero_net = tiny_network(0.0, 0.0, 0.0, 0.0, 1.5);
    for (double y : zero_net.predict_sequence(inputs)) CHECK(y == 1.5);
}

TEST_CASE("hidden activations stay inside (-1, 1)") {
    ElmanConfig cfg;
    cfg.num_hidden_layers = 2;
    cfg.hidden_nodes_per_layer = 8;
    cfg.input_dim = 3;
    cfg.seed = 99;
    const ElmanNetwork net(cfg);
    ContextState state = ContextState::zeros(cfg);
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        net.forward({rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0),
                     rng.uniform(-10.0, 10.0)},
                    state);
        for (double h : state.h) {
            CHECK(h > -1.0);
            CHECK(h < 1.0);
        }
    }
}

TEST_CASE("training a zero-input sequence with zero targets keeps zero loss") {
    ElmanConfig cfg;
    cfg.input_dim = 3;
    cfg.epochs = 5;
    cfg.seed = 7;
    ElmanNetwork net(cfg);
    SupervisedSequence seq;
    for (int t = 0; t < 20; ++t) {
        seq.inputs.push_back({0.0, 0.0, 0.0});
        seq.targets.push_back(0.0);
    }
    const auto history = net.train(seq);
    REQUIRE(history.size() == 5);
    for (double mse : history) CHECK(mse == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("a linear map is learnable at desk scale") {
    Rng rng(13);
    SupervisedSequence seq;
    double variance = 0.0;
    for (int t = 0; t < 300; ++t) {
        const double x1 = rng.uniform(-0.8, 0.8);
        seq.inputs.push_back({x1, rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)});
        seq.targets.push_back(x1);
        variance += x1 * x1;
    }
    variance /= 300.0;

    ElmanConfig cfg;
    cfg.num_hidden_layers = 1;
    cfg.hidden_nodes_per_layer = 8;
    cfg.input_dim = 3;
    cfg.learning_rate = 0.02;
    cfg.epochs = 500;
    cfg.seed = 3;
    ElmanNetwork net(cfg);
    const auto history = net.train(seq);
    CHECK(history.back() <= 0.01 * variance);
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
    const SupervisedSequence seq = random_sequence(40, 4, 17);
    ElmanConfig cfg;
    cfg.input_dim = 4;
    cfg.hidden_nodes_per_layer = 6;
    cfg.epochs = 8;
    cfg.seed = 21;

    ElmanNetwork a(cfg);
    ElmanNetwork b(cfg);
    const auto ha = a.train(seq);
    const auto hb = b.train(seq);
    CHECK(ha == hb);
    REQUIRE(a.parameter_count() == b.parameter_count());
    for (std::size_t i = 0; i < a.parameter_count(); ++i) {
        CHECK(a.parameter(i) == b.parameter(i));
    }
}

TEST_CASE("training on an extreme learning rate diverges loudly") {
    // The very first update (before clipping can engage) launches the
    // output weights far enough that the next squared error overflows.
    const SupervisedSequence seq = random_sequence(50, 3, 29);
    ElmanConfig cfg;
    cfg.input_dim = 3;
    cfg.learning_rate = 1e154;
    cfg.gradient_clip_norm = 1e30;
    cfg.epochs = 5;
    cfg.seed = 1;
    ElmanNetwork net(cfg);
    CHECK_THROWS_AS(net.train(seq), NumericalDivergence);
}

TEST_CASE("bptt gradient matches central finite differences") {
    SUBCASE("1-layer, 3-node, depth 1 and full") {
        for (int depth : {1, 10}) {
            ElmanConfig cfg;
            cfg.num_hidden_layers = 1;
            cfg.hidden_nodes_per_layer = 3;
            cfg.input_dim = 4;
            cfg.bptt_depth = depth;
            cfg.seed = 5;
            const ElmanNetwork net(cfg);
            const SupervisedSequence seq = random_sequence(10, 4, 31);
            CHECK(numerical_gradient_check(net, seq, 1e-5) <= 1e-4);
        }
    }

    SUBCASE("2-layer, depth 1 and full") {
        for (int depth : {1, 10}) {
            ElmanConfig cfg;
            cfg.num_hidden_layers = 2;
            cfg.hidden_nodes_per_layer = 3;
            cfg.input_dim = 3;
            cfg.bptt_depth = depth;
            cfg.seed = 6;
            const ElmanNetwork net(cfg);
            const SupervisedSequence seq = random_sequence(10, 3, 37);
            CHECK(numerical_gradient_check(net, seq, 1e-5) <= 1e-4);
        }
    }

    SUBCASE("zero network with zero targets has zero gradients") {
        ElmanConfig cfg;
        cfg.num_hidden_layers = 1;
        cfg.hidden_nodes_per_layer = 2;
        cfg.input_dim = 2;
        ElmanNetwork net = zeroed(cfg, 0.0);
        SupervisedSequence seq;
        for (int t = 0; t < 6; ++t) {
            seq.inputs.push_back({0.4, -0.2});
            seq.targets.push_back(0.0);
        }
        const auto grads = net.bptt_gradient(seq, 1);
        // output weights see zero hidden activations and zero error
        CHECK(grads[net.parameter_count() - 1] == 0.0);
        CHECK(numerical_gradient_check(net, seq, 1e-5) <= 1e-4);
    }

    SUBCASE("intermediate depth") {
        ElmanConfig cfg;
        cfg.num_hidden_layers = 2;
        cfg.hidden_nodes_per_layer = 2;
        cfg.input_dim = 2;
        cfg.bptt_depth = 3;
        cfg.seed = 8;
        const ElmanNetwork net(cfg);
        const SupervisedSequence seq = random_sequence(12, 2, 41);
        CHECK(numerical_gradient_check(net, seq, 1e-5) <= 1e-4);
    }
}

TEST_CASE("serialization round-trips predictions bitwise") {
    ElmanConfig cfg;
    cfg.num_hidden_layers = 2;
    cfg.hidden_nodes_per_layer = 5;
    cfg.input_dim = 7;
    cfg.epochs = 3;
    cfg.seed = 77;
    ElmanNetwork net(cfg);
    const SupervisedSequence seq = random_sequence(30, 7, 43);
    net.train(seq);

    const ElmanNetwork restored = ElmanNetwork::from_json_string(net.to_json_string());
    const auto a = net.predict_sequence(seq.inputs);
    const auto b = restored.predict_sequence(seq.inputs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    CHECK_THROWS(ElmanNetwork::from_json_string("{\"not\": \"a model\"}"));
}
