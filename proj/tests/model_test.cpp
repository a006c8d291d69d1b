#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fswrep/model.hpp"
#include "helpers.hpp"

using namespace fswrep;

namespace {

JointModel zero_model(std::size_t arity, const std::vector<std::size_t>& sizes,
                      std::size_t dim, TrainRegime regime = {}) {
    auto schema = testutil::schema_of_arity(arity);
    auto vocab = testutil::sized_vocab(sizes);
    auto model = init_model(schema, vocab, dim, 1, regime);
    for (auto& e : model.embeddings) e.fill(0.0);
    return model;
}

TEST(SubnetEnumeration, MatchesSchemaOrder) {
    auto model = zero_model(3, {3, 3, 3}, 2);
    model.schema = GroupSchema::svo();
    ASSERT_EQ(model.subnets.size(), 6u);
    EXPECT_EQ(model.subnet_name(0), "S->V");
    EXPECT_EQ(model.subnet_name(1), "V->S");
    EXPECT_EQ(model.subnet_name(2), "V->O");
    EXPECT_EQ(model.subnet_name(3), "O->V");
    EXPECT_EQ(model.subnet_name(4), "S->O");
    EXPECT_EQ(model.subnet_name(5), "O->S");
    EXPECT_EQ(enumerate_subnets(2).size(), 2u);
    EXPECT_EQ(enumerate_subnets(4).size(), 12u);
}

TEST(InitModel, DeterministicAndBounded) {
    auto schema = GroupSchema::svo();
    auto vocab = testutil::sized_vocab({100, 10, 20});
    auto a = init_model(schema, vocab, 25, 7);
    auto b = init_model(schema, vocab, 25, 7);
    EXPECT_EQ(a, b);
    auto c = init_model(schema, vocab, 25, 8);
    EXPECT_NE(a, c);

    EXPECT_EQ(a.embeddings[0].rows(), 100u);
    EXPECT_EQ(a.embeddings[0].cols(), 25u);
    for (const auto& e : a.embeddings) {
        for (double x : e.data()) {
            EXPECT_LE(std::fabs(x), 0.02);  // 0.5 / 25
        }
    }
    for (const auto& bias : a.biases) {
        for (double x : bias.data()) EXPECT_EQ(x, 0.0);
    }
}

TEST(InitModel, SepModeStartsFromIdenticalCopies) {
    auto schema = GroupSchema::svo();
    auto vocab = testutil::sized_vocab({4, 5, 6});
    auto shared = init_model(schema, vocab, 3, 11, {true, true});
    auto sep = init_model(schema, vocab, 3, 11, {true, false});
    ASSERT_EQ(sep.embeddings.size(), 12u);  // 6 subnets x (input, target)
    for (std::size_t s = 0; s < sep.subnets.size(); ++s) {
        EXPECT_EQ(sep.input_matrix(s),
                  shared.embeddings[static_cast<std::size_t>(sep.subnets[s].src)]);
        EXPECT_EQ(sep.target_matrix(s),
                  shared.embeddings[static_cast<std::size_t>(sep.subnets[s].dst)]);
        EXPECT_EQ(sep.merged_embedding(s % 3),
                  shared.embeddings[s % 3]);
    }
}

TEST(Forward, ZeroParametersGiveHalfEverywhere) {
    auto model = zero_model(2, {4, 3}, 5);
    std::vector<std::int32_t> inputs{0, 2, 3};
    auto pred = forward(model, 0, inputs);
    ASSERT_EQ(pred.rows(), 3u);
    ASSERT_EQ(pred.cols(), 3u);
    for (double p : pred.data()) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(Forward, MatchesSigmoidOfDotPlusBias) {
    auto model = zero_model(2, {2, 2}, 2);
    // a = [1, 0], target row 0 = [2, 0] -> sigma(2)
    model.input_matrix(0).at(0, 0) = 1.0;
    model.target_matrix(0).at(0, 0) = 2.0;
    std::vector<std::int32_t> inputs{0};
    auto pred = forward(model, 0, inputs);
    EXPECT_NEAR(pred.at(0, 0), 0.8807970779778823, 1e-15);
    EXPECT_DOUBLE_EQ(pred.at(0, 1), 0.5);

    // doubling the dot product strictly increases the prediction
    model.input_matrix(0).at(0, 0) = 2.0;
    auto pred2 = forward(model, 0, inputs);
    EXPECT_GT(pred2.at(0, 0), pred.at(0, 0));

    std::vector<std::int32_t> bad{7};
    EXPECT_THROW(forward(model, 0, bad), LookupError);
}

TEST(SubnetLoss, ClosedFormAtHalf) {
    Matrix pred(2, 3, 0.5);
    std::vector<std::int32_t> targets{0, 2};
    // -[ln 1/2 + 2 ln 1/2] = 3 ln 2 per row
    EXPECT_NEAR(subnet_loss(pred, targets), 2.0794415416798357, 1e-12);
}

TEST(SubnetLoss, PerfectPredictionGoesToZero) {
    Matrix pred(1, 3, 0.0);
    pred.at(0, 1) = 1.0;
    std::vector<std::int32_t> targets{1};
    // clamp keeps logs finite; loss is ~3 * 1e-7
    EXPECT_LT(subnet_loss(pred, targets), 1e-5);
    EXPECT_GT(subnet_loss(pred, targets), 0.0);
}

TEST(SubnetLoss, BatchMeanAndNanDetection) {
    Matrix one(1, 3, 0.4);
    Matrix two(2, 3, 0.4);
    std::vector<std::int32_t> t1{1}, t2{1, 1};
    EXPECT_DOUBLE_EQ(subnet_loss(one, t1), subnet_loss(two, t2));

    Matrix bad(1, 2, 0.5);
    bad.at(0, 1) = std::nan("");
    std::vector<std::int32_t> tb{0};
    EXPECT_THROW(subnet_loss(bad, tb), NumericError);
}

TEST(JointLoss, SumsAllSubnetworks) {
    auto model3 = zero_model(3, {3, 3, 3}, 4);
    std::vector<Record> batch{{0, 1, 2}, {1, 0, 0}};
    auto breakdown = joint_loss(model3, batch);
    ASSERT_EQ(breakdown.per_subnet.size(), 6u);
    // zero model, |V|=3 targets everywhere: total = 6 * 3 ln 2
    EXPECT_NEAR(breakdown.total, 12.476649250079015, 1e-9);

    double sum = 0.0;
    for (double l : breakdown.per_subnet) sum += l;
    EXPECT_NEAR(sum, breakdown.total, 1e-12 * std::fabs(breakdown.total));

    auto model2 = zero_model(2, {3, 5}, 4);
    std::vector<Record> pairs{{0, 1}};
    EXPECT_EQ(joint_loss(model2, pairs).per_subnet.size(), 2u);
}

TEST(JointLoss, AdditivityOnRandomModel) {
    auto schema = testutil::schema_of_arity(3);
    auto vocab = testutil::sized_vocab({5, 4, 6});
    auto model = init_model(schema, vocab, 5, 23);
    std::mt19937_64 rng(5);
    auto batch = testutil::random_batch(model, 17, rng);
    auto breakdown = joint_loss(model, batch);
    double sum = 0.0;
    for (double l : breakdown.per_subnet) sum += l;
    EXPECT_NEAR(sum, breakdown.total, 1e-12 * std::fabs(breakdown.total));
}

TEST(SharedParameters, SingleStoragePerGroup) {
    auto model = zero_model(3, {4, 4, 4}, 3);
    // group 1 is input of V->S and target of S->V; same storage everywhere
    model.embeddings[1].at(2, 0) = 42.0;
    std::size_t as_input = model.subnet_index(1, 0);
    std::size_t as_target = model.subnet_index(0, 1);
    EXPECT_EQ(&model.input_matrix(as_input), &model.embeddings[1]);
    EXPECT_EQ(&model.target_matrix(as_target), &model.embeddings[1]);
    EXPECT_EQ(model.input_matrix(as_input).at(2, 0), 42.0);
    EXPECT_EQ(model.target_matrix(as_target).at(2, 0), 42.0);
}

TEST(PairLogit, DotPlusDirectionalBiases) {
    auto model = zero_model(2, {2, 2}, 2);
    model.schema = GroupSchema({"A", "B"});
    // a = [1,2], b = [3,4]
    auto& ea = model.embeddings[0];
    ea.at(0, 0) = 1.0;
    ea.at(0, 1) = 2.0;
    auto& eb = model.embeddings[1];
    eb.at(1, 0) = 3.0;
    eb.at(1, 1) = 4.0;
    EXPECT_DOUBLE_EQ(pair_logit(model, "A", "g0w0", "B", "g1w1"), 11.0);

    // biases are read from both directions
    model.biases[model.subnet_index(0, 1)].at(0, 1) = 0.25;  // b_{A->B}[w_j]
    model.biases[model.subnet_index(1, 0)].at(0, 0) = 0.5;   // b_{B->A}[w_i]
    EXPECT_DOUBLE_EQ(pair_logit(model, "A", "g0w0", "B", "g1w1"), 11.75);
    EXPECT_DOUBLE_EQ(pair_logit(model, "A", "g0w0", "B", "g1w1", false), 11.0);

    // zero-valued pair
    EXPECT_DOUBLE_EQ(pair_logit(model, "A", "g0w1", "B", "g1w0"), 0.0);
    EXPECT_THROW(pair_logit(model, "A", "nope", "B", "g1w0"), LookupError);
}

TEST(TripletPlausibility, SumsThePairLogits) {
    auto model = zero_model(3, {2, 2, 2}, 3);
    model.schema = GroupSchema::svo();
    EXPECT_DOUBLE_EQ(triplet_plausibility(model, "g0w0", "g1w0", "g2w0"), 0.0);

    // s = v = o = [1,0,0] with zero biases -> 3
    model.embeddings[0].at(0, 0) = 1.0;
    model.embeddings[1].at(0, 0) = 1.0;
    model.embeddings[2].at(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(triplet_plausibility(model, "g0w0", "g1w0", "g2w0"), 3.0);

    // orthogonal unit vectors -> 0
    model.embeddings[1].at(0, 0) = 0.0;
    model.embeddings[1].at(0, 1) = 1.0;
    model.embeddings[2].at(0, 0) = 0.0;
    model.embeddings[2].at(0, 2) = 1.0;
    EXPECT_DOUBLE_EQ(triplet_plausibility(model, "g0w0", "g1w0", "g2w0"), 0.0);
}

TEST(ScoringView, MergesSepCopiesByAveraging) {
    auto schema = GroupSchema({"A", "B"});
    auto vocab = testutil::sized_vocab({2, 2});
    auto model = init_model(schema, vocab, 2, 3, {true, false});
    // group A has copies in subnets A->B (input) and B->A (target)
    std::size_t ab = model.subnet_index(0, 1);
    std::size_t ba = model.subnet_index(1, 0);
    model.embeddings[2 * ab].fill(1.0);      // input copy of A
    model.embeddings[2 * ba + 1].fill(3.0);  // target copy of A
    auto merged = model.merged_embedding(0);
    for (double x : merged.data()) EXPECT_DOUBLE_EQ(x, 2.0);
}

TEST(Loss, MonotoneInAttestedDotProduct) {
    // one-hot target rows: only the true-pair dot product changes
    auto model = zero_model(2, {2, 3}, 3);
    auto& targets = model.target_matrix(0);
    targets.at(0, 0) = 1.0;
    targets.at(1, 1) = 1.0;
    targets.at(2, 2) = 1.0;
    std::vector<Record> batch{{0, 1}};
    double before = joint_loss(model, batch).per_subnet[0];
    model.input_matrix(0).at(0, 1) = 0.5;  // raises a . t_true only
    double after = joint_loss(model, batch).per_subnet[0];
    EXPECT_LT(after, before);
}

}  // namespace
