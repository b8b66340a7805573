#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "heightlab/campaign.hpp"
#include "heightlab/json_io.hpp"

#include <sstream>

using namespace hl;

namespace {

std::vector<json> lines(const std::string& s) {
    std::vector<json> out;
    std::istringstream in(s);
    std::string l;
    while (std::getline(in, l)) out.push_back(json::parse(l));
    return out;
}

std::string report(const CampaignConfig& cfg, CampaignSummary* sum = nullptr) {
    std::ostringstream os;
    auto s = run_campaign(cfg, os);
    if (sum) *sum = s;
    return os.str();
}

}  // namespace

TEST_CASE("generated instances") {
    Caps caps;
    caps.n = 1;
    caps.d = 2;
    caps.coef = 3;
    auto a = generate_instance("implicit", 1, caps), b = generate_instance("implicit", 1, caps);
    CHECK(a.dump() == b.dump());
    auto pb = ImplicitProblem::from_json(a);
    CHECK(pb.n() == 1);
    CHECK(pb.P.total_degree() == 2);
    CHECK(pb.P.evaluate(pb.point()) == 0);
    for (const auto& [m, c] : pb.P.terms()) CHECK(abs(c) <= 3);
    CHECK(generate_instance("implicit", 2, caps).dump() != a.dump());

    auto st = generate_instance("staircase", 7, Caps{});
    Rational eps(st["epsilon"].get<std::string>());
    eps.canonicalize();
    CHECK(eps > 0);
    CHECK(eps <= 1);
    CHECK(!st["delta"].empty());

    Caps mc;
    mc.blocks = 2;
    mc.block_dim = 1;
    mc.form_degree = 3;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        Rng rng(s);
        auto inst = generate_vanishing_multiform(rng, mc);
        CHECK(inst.F.P.evaluate(inst.x) == 0);
        for (const auto& x : inst.x) CHECK(x != 0);
    }
    CHECK_THROWS(generate_instance("nonsense", 1, caps));
    Caps bad;
    bad.d = 0;
    CHECK_THROWS(generate_instance("implicit", 1, bad));
}

TEST_CASE("config round trip") {
    CampaignConfig cfg;
    cfg.seed = 12345;
    cfg.lemmas = {"2.1", "segre-roundtrip"};
    cfg.count = 7;
    cfg.caps.coef = 4;
    cfg.places = {Place::infinite(), Place::finite(17)};
    cfg.precision_bits = 200;
    auto back = CampaignConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    cfg.lemmas = {"9.9"};
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("empty lemma set") {
    CampaignConfig cfg;
    CampaignSummary sum;
    auto ls = lines(report(cfg, &sum));
    REQUIRE(ls.size() == 2);
    CHECK(ls[0]["type"] == "config");
    CHECK(ls[1]["type"] == "summary");
    CHECK(sum.instances == 0);
    CHECK(sum.exit_code() == 0);
}

TEST_CASE("determinism and record layout") {
    CampaignConfig cfg;
    cfg.seed = 3;
    cfg.count = 4;
    cfg.lemmas = kAllLemmas;
    CampaignSummary sum;
    const std::string a = report(cfg, &sum);
    CHECK(a == report(cfg));
    CHECK(sum.exit_code() == 0);
    CHECK(sum.errors == 0);
    CHECK(sum.tally.failed == 0);
    auto ls = lines(a);
    CHECK(ls.size() == kAllLemmas.size() * 4 + 2);
    for (std::size_t i = 1; i + 1 < ls.size(); ++i) {
        const auto& r = ls[i];
        CHECK(r["type"] == "instance");
        CHECK(r.contains("seed"));
        CHECK(r.contains("instance"));
        CHECK(!r["checks"].empty());
        for (const auto& c : r["checks"]) {
            CHECK(c.contains("lhs"));
            CHECK(c.contains("rhs"));
            CHECK(c.contains("margin"));
        }
    }
    cfg.seed = 4;
    CHECK(a != report(cfg));
}

TEST_CASE("module errors become records") {
    CampaignConfig cfg;
    auto r = run_instance(cfg, "no-such-lemma", 0);
    CHECK(r["verdict"] == "error");
    CHECK(r["error"].get<std::string>().find("no-such-lemma") != std::string::npos);
}

TEST_CASE("low precision stays sound") {
    CampaignConfig cfg;
    cfg.lemmas = {"1.1", "heights"};
    cfg.count = 20;
    cfg.precision_bits = 60;
    CampaignSummary sum;
    report(cfg, &sum);
    CHECK(sum.tally.failed == 0);
    CHECK(sum.exit_code() == 0);
    set_precision_bits(128);
}
