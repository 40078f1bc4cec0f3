#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bp/message.hpp"
#include "bp/rng.hpp"
#include "support/random_setups.hpp"

using namespace bp;
using namespace bp::message;

namespace {

corpus::SetupRecord farm_record() {
  std::ifstream in("data/vertical_farm.json", std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return corpus::parse_record(buf.str());
}

SenderTypeProfile farm_profile(const corpus::BayesianSetup& setup) {
  return SenderTypeProfile::canonical(setup.state_space(), setup.signals,
                                      setup.receiver_utility());
}

TypeBelief belief_q(double q) {
  return TypeBelief({std::string(kHonest), std::string(kDishonest)}, {1.0 - q, q});
}

bool has_digit(std::string_view text) {
  for (char c : text) {
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("SFNL composition carries the worked inference") {
  auto rec = farm_record();
  auto profile = farm_profile(rec.setup);
  // Belief matching the given schema's bad-row leak q = 0.3.
  auto m = compose(rec.setup, profile, belief_q(0.3), "Positive", Style::sfnl);

  REQUIRE(m.inf.has_value());
  REQUIRE(m.inf->posterior.has_value());
  CHECK(m.inf->posterior->prob("Positive") ==
        doctest::Approx(40.0 / 43.0).epsilon(1e-12));
  CHECK(m.inf->posterior->prob("Negative") ==
        doctest::Approx(3.0 / 43.0).epsilon(1e-12));
  REQUIRE(m.inf->accept_eu.has_value());
  CHECK(*m.inf->accept_eu == doctest::Approx(25.0 / 43.0).epsilon(1e-12));
  CHECK(std::fabs(*m.inf->accept_eu - 0.58) < 0.005);
  CHECK(m.inf->claim == Claim::numeric);
  CHECK(m.basic.has_value());
  CHECK(m.type_part.has_value());
  CHECK(m.des.signal == "Positive");
}

TEST_CASE("FNL composition has the same payload, different claim") {
  auto rec = farm_record();
  auto profile = farm_profile(rec.setup);
  auto sfnl = compose(rec.setup, profile, belief_q(0.3), "Positive", Style::sfnl);
  auto fnl = compose(rec.setup, profile, belief_q(0.3), "Positive", Style::fnl);

  CHECK(fnl.inf->posterior->probs() == sfnl.inf->posterior->probs());
  CHECK(*fnl.inf->accept_eu == *sfnl.inf->accept_eu);
  CHECK(fnl.inf->claim == Claim::greater_than_zero);
  CHECK(!has_digit(fnl.rendered));
  CHECK(fnl.rendered.find("confident") != std::string::npos);
}

TEST_CASE("a fully honest profile composing the bad signal claims nothing") {
  auto rec = farm_record();
  auto profile = farm_profile(rec.setup);
  auto m = compose(rec.setup, profile, belief_q(0.0), "Negative", Style::sfnl);
  CHECK(m.inf->posterior->prob("Negative") == 1.0);
  CHECK(*m.inf->accept_eu == -5.0);
  CHECK(m.inf->claim == Claim::none);
  CHECK(m.rendered.find("greater than 0") == std::string::npos);
}

TEST_CASE("composing an impossible signal raises ZeroMarginal") {
  auto rec = farm_record();
  auto profile = farm_profile(rec.setup);
  // Fully dishonest sender never emits the bad signal.
  CHECK_THROWS_AS(compose(rec.setup, profile, belief_q(1.0), "Negative", Style::sfnl),
                  ZeroMarginal);
  CHECK_THROWS_AS(compose(rec.setup, profile, belief_q(0.3), "Maybe", Style::sfnl),
                  PreconditionViolation);
}

TEST_CASE("SFNL render shows the calculation line") {
  auto rec = farm_record();
  auto m = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                   Style::sfnl);
  CHECK(m.rendered.find("≈ 0.58") != std::string::npos);
  CHECK(m.rendered.find("93% × 1.0 + 7% × (-5.0)") != std::string::npos);
  CHECK(m.rendered.find("which is greater than 0") != std::string::npos);
}

TEST_CASE("render is deterministic") {
  auto rec = farm_record();
  auto m1 = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                    Style::sfnl);
  auto m2 = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                    Style::sfnl);
  CHECK(m1.rendered == m2.rendered);
  CHECK(render(m1) == m1.rendered);
}

TEST_CASE("utility ablation replaces the numeric line with the comparative claim") {
  auto rec = farm_record();
  auto m = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                   Style::sfnl);
  auto ablated = ablate(m, AblationSpec::parse("utility"));
  CHECK(ablated.rendered.find("the expected payoff is greater than 0") !=
        std::string::npos);
  CHECK(ablated.rendered.find("≈") == std::string::npos);
  CHECK(!ablated.inf->accept_eu.has_value());
  CHECK(!ablated.inf->accept_utils.has_value());
  CHECK(ablated.inf->claim == Claim::greater_than_zero);
  // posterior text stays
  CHECK(ablated.inf->posterior.has_value());
  CHECK(ablated.rendered.find("93%") != std::string::npos);
}

TEST_CASE("utility+posterior ablation strips all inference numerics") {
  auto rec = farm_record();
  auto m = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                   Style::sfnl);
  auto ablated = ablate(m, AblationSpec::parse("utility,posterior"));
  CHECK(!ablated.inf->posterior.has_value());
  CHECK(!ablated.inf->accept_eu.has_value());
  CHECK(ablated.rendered.find("93%") == std::string::npos);
  CHECK(ablated.rendered.find("≈") == std::string::npos);
  CHECK(ablated.rendered.find("greater than 0") != std::string::npos);

  // In SFNL the payoff line quotes the posterior, so dropping the posterior
  // alone takes the numerics with it.
  auto coupled = ablate(m, AblationSpec::parse("posterior"));
  CHECK(!coupled.inf->posterior.has_value());
  CHECK(!coupled.inf->accept_eu.has_value());
}

TEST_CASE("FNL ablates utility and posterior independently") {
  auto rec = farm_record();
  auto m = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                   Style::fnl);
  auto no_post = ablate(m, AblationSpec::parse("posterior"));
  CHECK(!no_post.inf->posterior.has_value());
  CHECK(no_post.inf->accept_eu.has_value());

  auto no_util = ablate(m, AblationSpec::parse("utility"));
  CHECK(no_util.inf->posterior.has_value());
  CHECK(!no_util.inf->accept_eu.has_value());
  CHECK(no_util.inf->claim == Claim::greater_than_zero);
}

TEST_CASE("schema ablation removes the type disclosure and nothing else") {
  auto rec = farm_record();
  auto m = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                   Style::sfnl);
  auto ablated = ablate(m, AblationSpec::parse("schema"));
  CHECK(!ablated.type_part.has_value());
  CHECK(ablated.des.signal == m.des.signal);
  CHECK(ablated.basic.has_value());
  CHECK(ablated.inf->posterior == m.inf->posterior);
  CHECK(ablated.inf->accept_eu == m.inf->accept_eu);
}

TEST_CASE("ablation spec parsing") {
  auto spec = AblationSpec::parse("utility,posterior,schema");
  CHECK(spec.drop.size() == 3);
  CHECK(spec.label() == "utility&posterior&schema");
  CHECK_THROWS_AS(AblationSpec::parse(""), InvariantViolation);
  CHECK_THROWS_AS(AblationSpec::parse("priors"), InvariantViolation);
}

TEST_CASE("ablation is idempotent and keeps des intact") {
  Rng rng(0xab1a7e);
  const std::vector<std::string> all_specs = {
      "utility", "posterior", "schema", "utility,posterior",
      "utility,schema", "posterior,schema", "utility,posterior,schema"};
  int done = 0;
  for (int i = 0; done < 1000; ++i) {
    auto rec = bp_test::random_setup_record(rng, i);
    auto profile = farm_profile(rec.setup);
    const double q = rec.setup.signal_probs[1][0];
    const auto style = rng.uniform() < 0.5 ? Style::sfnl : Style::fnl;
    const char* signal = rng.uniform() < 0.8 ? "Positive" : "Negative";
    if (signal == std::string("Negative") && q >= 1.0) continue;
    auto m = compose(rec.setup, profile, belief_q(q), signal, style);
    const auto& spec_text = all_specs[rng.next() % all_specs.size()];
    auto spec = AblationSpec::parse(spec_text);
    auto once = ablate(m, spec);
    auto twice = ablate(once, spec);
    CHECK(once.rendered == twice.rendered);
    CHECK(once.des.signal == m.des.signal);
    CHECK(once.des.narrative == m.des.narrative);
    CHECK((once.inf.has_value() == twice.inf.has_value()));
    if (once.inf && twice.inf) {
      CHECK(once.inf->claim == twice.inf->claim);
      CHECK(once.inf->posterior == twice.inf->posterior);
      CHECK(once.inf->accept_eu == twice.inf->accept_eu);
    }
    CHECK((once.type_part.has_value() == twice.type_part.has_value()));
    ++done;
  }
}

TEST_CASE("composed messages are internally consistent with bp-core") {
  Rng rng(0x1eaf);
  for (int i = 0; i < 300; ++i) {
    auto rec = bp_test::random_setup_record(rng, i);
    auto profile = farm_profile(rec.setup);
    const double q = rec.setup.signal_probs[1][0];
    auto m = compose(rec.setup, profile, belief_q(q), "Positive", Style::sfnl);
    // Re-derive from (setup, type_part, des) through bp-core.
    auto schema = effective_schema(m.type_part->profile, m.type_part->belief);
    auto post = posterior_update(rec.setup.prior(), schema, m.des.signal);
    const double eu =
        expected_utility(post, rec.setup.receiver_utility(), kAccept);
    for (std::size_t k = 0; k < post.size(); ++k) {
      CHECK(std::fabs(post.probs()[k] - m.inf->posterior->probs()[k]) <= 1e-9);
    }
    CHECK(std::fabs(eu - *m.inf->accept_eu) <= 1e-9);
  }
}

TEST_CASE("FNL rendering never leaks a numeral") {
  Rng rng(0xf71);
  for (int i = 0; i < 300; ++i) {
    auto rec = bp_test::random_setup_record(rng, i);
    auto profile = farm_profile(rec.setup);
    const double q = rec.setup.signal_probs[1][0];
    auto m = compose(rec.setup, profile, belief_q(q), "Positive", Style::fnl);
    CHECK(!has_digit(m.rendered));
    auto ablated = ablate(m, AblationSpec::parse("utility"));
    CHECK(!has_digit(ablated.rendered));
  }
}

TEST_CASE("transcript JSON uses the agreed field names") {
  auto rec = farm_record();
  auto m = compose(rec.setup, farm_profile(rec.setup), belief_q(0.3), "Positive",
                   Style::sfnl);
  auto j = to_json(m);
  CHECK(j.contains("basic"));
  CHECK(j.contains("type"));
  CHECK(j.contains("des"));
  CHECK(j.contains("inf"));
  CHECK(j["style"] == "SFNL");
  CHECK(j["des"]["signal"] == "Positive");
  CHECK(j["inf"]["claim"] == "numeric");

  auto naive = m;
  naive.basic.reset();
  naive.type_part.reset();
  naive.inf.reset();
  auto j2 = to_json(naive);
  CHECK(!j2.contains("basic"));
  CHECK(!j2.contains("type"));
  CHECK(!j2.contains("inf"));
}
