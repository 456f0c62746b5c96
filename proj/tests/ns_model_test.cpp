#include "bach/ns_model.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bach/explorer.hpp"
#include "bach/interpreter.hpp"
#include "bach/logic.hpp"
#include "bach/parser.hpp"

namespace bach {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ADD_FAILURE() << "cannot open " << path;
    return "";
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string model_path(const char* name) {
  return std::string(BACH_MODELS_DIR) + "/" + name;
}

TEST(Vocabulary, NinePairwiseDistinctTokens) {
  const NsVocabulary& v = ns_vocabulary();
  const std::vector<SiTerm> all{v.na,  v.nb,  v.nm,    v.pka, v.pkb,
                                v.pkm, v.alice, v.bob, v.mallory};
  std::set<SiTerm> distinct(all.begin(), all.end());
  EXPECT_EQ(distinct.size(), 9u);
  for (const SiTerm& t : all) {
    EXPECT_TRUE(t.is_token()) << render(t);
  }
}

TEST(Vocabulary, PublicKeyMapping) {
  const NsVocabulary& v = ns_vocabulary();
  EXPECT_EQ(public_key(v.alice), v.pka);
  EXPECT_EQ(public_key(v.bob), v.pkb);
  EXPECT_EQ(public_key(v.mallory), v.pkm);
  EXPECT_THROW(public_key(token("eve")), Error);
}

TEST(Vocabulary, MessageConstructors) {
  const NsVocabulary& v = ns_vocabulary();
  EXPECT_EQ(render(message(v.alice, v.bob, encrypt_i(v.na, v.alice, v.pkb))),
            "message(alice,bob,encrypt_i(na,alice,pkb))");
  EXPECT_EQ(render(encrypt_ii(v.na, v.nb, v.pka)), "encrypt_ii(na,nb,pka)");
  EXPECT_EQ(render(encrypt_iii(v.nb, v.pkb)), "encrypt_iii(nb,pkb)");
  EXPECT_EQ(render(a_running(v.bob)), "a_running(bob)");
  EXPECT_EQ(render(b_commit(v.alice)), "b_commit(alice)");
}

TEST(ModelShape, DeclarationsEntryAndGoal) {
  Model m = build_ns_model();
  EXPECT_EQ(m.procs.names(),
            (std::vector<std::string>{"Alice", "Bob", "Mallory", "Protocol"}));
  EXPECT_EQ(m.formulae.names(),
            (std::vector<std::string>{"inproper_init", "end_session", "F"}));
  EXPECT_EQ(m.entry, "Protocol");
  EXPECT_EQ(m.goal, "F");
  EXPECT_EQ(m.procs.at("Protocol").body,
            par(par(call("Alice"), call("Bob")), call("Mallory")));
  for (const std::string& name : m.procs.names()) {
    EXPECT_TRUE(m.procs.at(name).formals.empty()) << name;
  }
}

TEST(ModelShape, AliceChoosesAPartnerThenBindsTheReturnedNonce) {
  const NsVocabulary& v = ns_vocabulary();
  Model m = build_ns_model();
  const Agent& alice = m.procs.at("Alice").body;
  ASSERT_EQ(alice.kind(), Agent::Kind::choice);
  EXPECT_EQ(alice.left(), detail::ns_alice_case(v.bob, v.pkb));
  EXPECT_EQ(alice.right(), detail::ns_alice_case(v.mallory, v.pkm));

  // Each partner case ends in a sum binding the nonce from message ii; it
  // expands to one alternative per nonce of the vocabulary.
  const Agent& partner_case = alice.left();
  ASSERT_EQ(partner_case.kind(), Agent::Kind::seq);
  const Agent& nonce_sum = partner_case.right();
  ASSERT_EQ(nonce_sum.kind(), Agent::Kind::gsum);
  EXPECT_EQ(nonce_sum.binder(), "WNonce");
  Agent inst_na = substitute(nonce_sum.body(), "WNonce", v.na);
  Agent inst_nb = substitute(nonce_sum.body(), "WNonce", v.nb);
  Agent inst_nm = substitute(nonce_sum.body(), "WNonce", v.nm);
  EXPECT_EQ(expand_gsum(nonce_sum), choice(inst_na, choice(inst_nb, inst_nm)));
}

TEST(ModelShape, BobAnnouncesTheApparentInitiator) {
  const NsVocabulary& v = ns_vocabulary();
  Model m = build_ns_model();
  const Agent& bob = m.procs.at("Bob").body;
  ASSERT_EQ(bob.kind(), Agent::Kind::gsum);
  EXPECT_EQ(bob.binder(), "Y");
  EXPECT_EQ(bob.domain(), (std::vector<SiTerm>{v.alice, v.mallory}));
  Agent inst_alice = substitute(bob.body(), "Y", v.alice);
  const Agent expanded = expand_gsum(bob);
  ASSERT_EQ(expanded.kind(), Agent::Kind::choice);
  EXPECT_EQ(expanded.left(), inst_alice);
  // The first visible action of each alternative is the session marker.
  ASSERT_EQ(inst_alice.kind(), Agent::Kind::seq);
  EXPECT_EQ(inst_alice.left(), tell(b_running(v.alice)));
}

TEST(ModelFiles, AttackFileMatchesTheBuilder) {
  Model from_file = parse_program(read_file(model_path("ns.bach")));
  EXPECT_EQ(from_file, build_ns_model());
}

TEST(ModelFiles, HonestFileMatchesTheBuilder) {
  Model from_file = parse_program(read_file(model_path("ns_honest.bach")));
  EXPECT_EQ(from_file, build_honest_model());
}

TEST(Formula, BlocksHonestSessionStartsUntilBobCommits) {
  const NsVocabulary& v = ns_vocabulary();
  Model m = build_ns_model();
  const BslFormula goal = m.goal_formula();

  // While nothing incriminating happened the formula just keeps watching.
  Store empty;
  EXPECT_EQ(derive(empty, goal, m.formulae),
            std::vector<BslFormula>{fvar("F")});

  // A store recording an honest session start admits no residual at all.
  Store honest_start;
  honest_start.tell(a_running(v.bob));
  EXPECT_TRUE(derive(honest_start, goal, m.formulae).empty());
  Store honest_answer;
  honest_answer.tell(b_running(v.alice));
  EXPECT_TRUE(derive(honest_answer, goal, m.formulae).empty());

  // Once Bob commits to alice the formula can stop (or keep watching).
  Store committed;
  committed.tell(b_commit(v.alice));
  EXPECT_EQ(derive(committed, goal, m.formulae),
            (std::vector<BslFormula>{fvar("F"), epsilon()}));
}

TEST(Formula, FirstConstrainedStepsAvoidHonestMarkers) {
  const NsVocabulary& v = ns_vocabulary();
  Model m = build_ns_model();
  Configuration c0 = initial_configuration(m.entry_agent(), m.goal_formula());
  std::vector<Configuration> succs = constrained_step(c0, m.procs, m.formulae);
  // Mallory starts with receives and is blocked on the empty store; the
  // honest markers are filtered by the formula. Two openings remain.
  ASSERT_EQ(succs.size(), 2u);
  EXPECT_EQ(succs[0].trace.back().term, a_running(v.mallory));
  EXPECT_EQ(succs[1].trace.back().term, b_running(v.mallory));
  for (const Configuration& succ : succs) {
    EXPECT_EQ(succ.formula, fvar("F"));
  }
}

TEST(Exchanges, RenderFormat) {
  const NsVocabulary& v = ns_vocabulary();
  Exchange e{v.alice, v.bob, encrypt_i(v.na, v.alice, v.pkb)};
  EXPECT_EQ(render(e), "alice -> bob : encrypt_i(na,alice,pkb)");
}

TEST(Exchanges, ExpectedAttackSummary) {
  const NsVocabulary& v = ns_vocabulary();
  std::vector<Exchange> rows = expected_attack_summary();
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (Exchange{v.alice, v.mallory, encrypt_i(v.na, v.alice, v.pkm)}));
  EXPECT_EQ(rows[1], (Exchange{v.mallory, v.bob, encrypt_i(v.na, v.alice, v.pkb)}));
  EXPECT_EQ(rows[2], (Exchange{v.bob, v.mallory, encrypt_ii(v.na, v.nb, v.pka)}));
  EXPECT_EQ(rows[3], (Exchange{v.mallory, v.alice, encrypt_ii(v.na, v.nb, v.pka)}));
  EXPECT_EQ(rows[4], (Exchange{v.alice, v.mallory, encrypt_iii(v.nb, v.pkm)}));
  EXPECT_EQ(rows[5], (Exchange{v.mallory, v.bob, encrypt_iii(v.nb, v.pkb)}));
}

TEST(Exchanges, ProjectionKeepsOnlyToldMessages) {
  const NsVocabulary& v = ns_vocabulary();
  const SiTerm p = encrypt_i(v.na, v.alice, v.pkm);
  std::vector<StepLabel> trace{
      {PrimKind::tell, a_running(v.mallory)},
      {PrimKind::tell, message(v.alice, v.mallory, p)},
      {PrimKind::get, message(v.alice, v.mallory, p)},
      {PrimKind::tell, b_commit(v.alice)},
  };
  std::vector<Exchange> projected = project_exchanges(trace);
  ASSERT_EQ(projected.size(), 1u);
  EXPECT_EQ(projected[0], (Exchange{v.alice, v.mallory, p}));
  EXPECT_TRUE(exchanges_fully_paired(trace));
}

TEST(Exchanges, PairingRejectsOrphanedMessages) {
  const NsVocabulary& v = ns_vocabulary();
  const SiTerm msg = message(v.alice, v.bob, encrypt_iii(v.nb, v.pkb));
  // A get with no preceding matching tell.
  EXPECT_FALSE(exchanges_fully_paired({{PrimKind::get, msg}}));
  // A told message never consumed.
  EXPECT_FALSE(exchanges_fully_paired({{PrimKind::tell, msg}}));
  // Order matters: tell before get balances, get before tell does not.
  EXPECT_TRUE(exchanges_fully_paired(
      {{PrimKind::tell, msg}, {PrimKind::get, msg}}));
  EXPECT_FALSE(exchanges_fully_paired(
      {{PrimKind::get, msg}, {PrimKind::tell, msg}}));
  // Non-message terms do not participate in the balance.
  EXPECT_TRUE(exchanges_fully_paired({{PrimKind::tell, a_running(v.bob)}}));
}

TEST(Attack, SearchFindsTheSixteenStepWitness) {
  Model m = build_ns_model();
  SearchResult r = search(m.entry_agent(), m.goal_formula(), m.procs,
                          m.formulae);
  ASSERT_EQ(r.status, SearchStatus::witness_found);
  ASSERT_EQ(r.witnesses.size(), 1u);
  const Witness& w = r.witnesses.front();
  EXPECT_EQ(w.trace.size(), 16u);
  EXPECT_EQ(project_exchanges(w.trace), expected_attack_summary());
  EXPECT_TRUE(exchanges_fully_paired(w.trace));
  EXPECT_TRUE(w.final_config.formula.is_epsilon());
  EXPECT_EQ(w.final_config.store.dump(),
            "a_commit(mallory) : 1\n"
            "a_running(mallory) : 1\n"
            "b_commit(alice) : 1\n"
            "b_running(mallory) : 1\n");
}

TEST(Honest, SessionCompletesInTenSteps) {
  const NsVocabulary& v = ns_vocabulary();
  Model m = build_honest_model();
  SearchResult r = search(m.entry_agent(), m.goal_formula(), m.procs,
                          m.formulae);
  ASSERT_EQ(r.status, SearchStatus::witness_found);
  const Witness& w = r.witnesses.front();
  EXPECT_EQ(w.trace.size(), 10u);
  EXPECT_TRUE(exchanges_fully_paired(w.trace));
  EXPECT_EQ(w.final_config.store.count(a_commit(v.bob)), 1);
  EXPECT_EQ(w.final_config.store.count(b_commit(v.alice)), 1);
  std::vector<Exchange> expected{
      {v.alice, v.bob, encrypt_i(v.na, v.alice, v.pkb)},
      {v.bob, v.alice, encrypt_ii(v.na, v.nb, v.pka)},
      {v.alice, v.bob, encrypt_iii(v.nb, v.pkb)},
  };
  EXPECT_EQ(project_exchanges(w.trace), expected);
}

}  // namespace
}  // namespace bach
