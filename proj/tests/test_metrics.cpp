#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dogfit/metrics.hpp"

using namespace dogfit;

TEST_CASE("iou") {
    MaskImage a(10, 10, 0), b(10, 10, 0);
    SECTION("identical masks give 1") {
        a.at(2, 3) = b.at(2, 3) = 255;
        a.at(5, 5) = b.at(5, 5) = 255;
        CHECK(iou(a, b) == 1.0);
        CHECK(iou(a, a) == 1.0);
    }
    SECTION("disjoint masks give 0") {
        a.at(1, 1) = 255;
        b.at(8, 8) = 255;
        CHECK(iou(a, b) == 0.0);
    }
    SECTION("half overlap") {
        a.at(0, 0) = a.at(0, 1) = 255;
        b.at(0, 0) = 255;
        CHECK(iou(a, b) == Catch::Approx(0.5));
    }
    SECTION("both empty counts as perfect agreement") { CHECK(iou(a, b) == 1.0); }
    SECTION("size mismatch is an error") {
        MaskImage c(9, 10, 0);
        CHECK_THROWS_AS(iou(a, c), std::invalid_argument);
    }
}

TEST_CASE("iou_w5") {
    SECTION("worst single frame of 20") {
        std::vector<double> per_frame(19, 1.0);
        per_frame.push_back(0.2);
        CHECK(iou_w5(per_frame) == Catch::Approx(0.2));
    }
    SECTION("ceil keeps at least one frame") {
        CHECK(iou_w5({0.7}) == Catch::Approx(0.7));
        CHECK(iou_w5({0.9, 0.4, 0.8}) == Catch::Approx(0.4));
    }
    SECTION("w5 never exceeds the mean") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<double> per_frame(60);
        for (auto& v : per_frame) v = uni(rng);
        const double mean =
            std::accumulate(per_frame.begin(), per_frame.end(), 0.0) / per_frame.size();
        CHECK(iou_w5(per_frame) <= mean);
    }
}

TEST_CASE("fscore") {
    SECTION("identical sets give 1") {
        std::vector<Vec3<double>> a = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0.5}};
        CHECK(fscore(a, a) == 1.0);
    }
    SECTION("sets separated by 1 m give 0") {
        std::vector<Vec3<double>> a = {{0, 0, 0}}, b = {{1, 0, 0}};
        CHECK(fscore(a, b) == 0.0);
    }
    SECTION("constructed precision 0.5 / recall 1.0 gives 2/3") {
        // gt: single point at origin. pred: one point within tau, one far away.
        std::vector<Vec3<double>> gt = {{0, 0, 0}};
        std::vector<Vec3<double>> pred = {{0.03, 0, 0}, {10, 0, 0}};
        const PrecisionRecall pr = fscore_parts(pred, gt);
        CHECK(pr.precision == Catch::Approx(0.5));
        CHECK(pr.recall == Catch::Approx(1.0));
        CHECK(pr.fscore() == Catch::Approx(2.0 / 3.0));
    }
    SECTION("matches the exhaustive pairwise oracle exactly") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> uni(0.0, 0.5);
        std::vector<Vec3<double>> pred(400), gt(500);
        for (auto& p : pred) p = {uni(rng), uni(rng), uni(rng)};
        for (auto& p : gt) p = {uni(rng), uni(rng), uni(rng)};

        auto brute = [](const std::vector<Vec3<double>>& from,
                        const std::vector<Vec3<double>>& to) {
            long hits = 0;
            for (const auto& p : from) {
                double best = 1e18;
                for (const auto& q : to) best = std::min(best, dot(p - q, p - q));
                if (best <= kFscoreTau * kFscoreTau) ++hits;
            }
            return static_cast<double>(hits) / static_cast<double>(from.size());
        };
        const PrecisionRecall pr = fscore_parts(pred, gt);
        CHECK(pr.precision == brute(pred, gt));
        CHECK(pr.recall == brute(gt, pred));
    }
    SECTION("empty sets are rejected") {
        std::vector<Vec3<double>> a = {{0, 0, 0}};
        CHECK_THROWS_AS(fscore(a, {}), std::invalid_argument);
    }
}

TEST_CASE("penetration percentage") {
    SECTION("all above the floor gives 0") {
        std::vector<std::vector<Vec3<double>>> frames(3, {{0, 0, 0.1}, {0, 0, 0.5}});
        CHECK(pene_pct(frames) == 0.0);
    }
    SECTION("all below gives 1") {
        std::vector<std::vector<Vec3<double>>> frames(2, {{0, 0, -0.1}, {0, 0, -0.5}});
        CHECK(pene_pct(frames) == 1.0);
    }
    SECTION("half below in every frame gives 0.5") {
        std::vector<std::vector<Vec3<double>>> frames(4, {{0, 0, -0.1}, {0, 0, 0.1}});
        CHECK(pene_pct(frames) == Catch::Approx(0.5));
    }
    SECTION("z exactly 0 does not count as penetration") {
        std::vector<std::vector<Vec3<double>>> frames(1, {{0, 0, 0.0}});
        CHECK(pene_pct(frames) == 0.0);
    }
}

TEST_CASE("jitter") {
    SECTION("constant positions give 0") {
        std::vector<std::vector<Vec3<double>>> frames(5, {{1, 2, 3}});
        CHECK(jitter(frames) == 0.0);
    }
    SECTION("constant velocity gives 0") {
        std::vector<std::vector<Vec3<double>>> frames;
        for (int t = 0; t < 6; ++t) frames.push_back({{0.1 * t, -0.2 * t, 0.05 * t}});
        CHECK(jitter(frames) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("quadratic trajectory gives exactly 2a per axis") {
        const double a = 0.03;
        std::vector<std::vector<Vec3<double>>> frames;
        for (int t = 0; t < 8; ++t) frames.push_back({{a * t * t, 0, 0}});
        CHECK(jitter(frames) == Catch::Approx(2.0 * a));
    }
    SECTION("fewer than three frames gives 0") {
        std::vector<std::vector<Vec3<double>>> frames(2, {{0, 0, 0}});
        CHECK(jitter(frames) == 0.0);
    }
}

TEST_CASE("foot skating") {
    SECTION("feet always above the contact height give 0") {
        std::vector<std::vector<Vec3<double>>> frames;
        for (int t = 0; t < 5; ++t) frames.push_back({{0.1 * t, 0, 0.1}});
        CHECK(foot_skating(frames) == 0.0);
    }
    SECTION("planted foot gives 0") {
        std::vector<std::vector<Vec3<double>>> frames(5, {{0.3, 0.2, 0.0}});
        CHECK(foot_skating(frames) == 0.0);
    }
    SECTION("grounded foot sliding 0.02 m per frame gives 0.02") {
        std::vector<std::vector<Vec3<double>>> frames;
        for (int t = 0; t < 6; ++t) frames.push_back({{0.02 * t, 0, 0.0}});
        CHECK(foot_skating(frames) == Catch::Approx(0.02));
    }
    SECTION("vertical motion while grounded does not count") {
        std::vector<std::vector<Vec3<double>>> frames;
        for (int t = 0; t < 4; ++t) frames.push_back({{0.5, 0.5, 0.005 * t}});
        CHECK(foot_skating(frames) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("contact requires both endpoints below h") {
        std::vector<std::vector<Vec3<double>>> frames = {{{0, 0, 0.0}}, {{1, 0, 0.1}}, {{2, 0, 0.0}}};
        CHECK(foot_skating(frames) == 0.0);
    }
}

TEST_CASE("metrics report json round trip") {
    MetricsReport m;
    m.iou = 0.91;
    m.iou_w5 = 0.85;
    m.fscore = 0.93;
    m.pene_pct = 0.01;
    m.jitter = 0.002;
    m.foot_skating = 0.004;
    m.iou_per_frame = {0.9, 0.92};
    m.fscore_per_frame = {0.93, 0.93};
    m.pene_per_frame = {0.0, 0.02};
    const nlohmann::json j = m;
    const MetricsReport back = j.get<MetricsReport>();
    CHECK(back.iou == m.iou);
    CHECK(back.iou_w5 == m.iou_w5);
    CHECK(back.fscore == m.fscore);
    CHECK(back.pene_pct == m.pene_pct);
    CHECK(back.jitter == m.jitter);
    CHECK(back.foot_skating == m.foot_skating);
    CHECK(back.iou_per_frame == m.iou_per_frame);
}
