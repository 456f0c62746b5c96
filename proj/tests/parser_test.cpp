#include "bach/parser.hpp"

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bach/agent.hpp"
#include "bach/errors.hpp"
#include "bach/logic.hpp"
#include "bach/ns_model.hpp"
#include "bach/term.hpp"
#include "support/generators.hpp"

namespace bach {
namespace {

SiTerm tok(const char* name) { return token(name); }

TEST(Parser, SingleGuardedProcedure) {
  Model m = parse_program("proc P = tell(a) ; P .");
  EXPECT_EQ(m.procs.names(), (std::vector<std::string>{"P"}));
  EXPECT_EQ(m.procs.at("P").body, seq(tell(tok("a")), call("P")));
  EXPECT_FALSE(m.entry.has_value());  // no run directive, no Protocol
}

TEST(Parser, PrecedenceSequenceOverParallelOverChoice) {
  Model m = parse_program("proc A = tell(f(na)) + (ask(b) || nask(c)) .");
  EXPECT_EQ(m.procs.at("A").body,
            choice(tell(compound("f", {tok("na")})),
                   par(ask(tok("b")), nask(tok("c")))));
  Model flat = parse_program("proc A = tell(a) ; tell(b) || ask(c) + get(d) .");
  // ';' binds before '||' binds before '+'.
  EXPECT_EQ(flat.procs.at("A").body,
            choice(par(seq(tell(tok("a")), tell(tok("b"))), ask(tok("c"))),
                   get(tok("d"))));
}

TEST(Parser, LeftAssociativeOperators) {
  Model m = parse_program("proc A = tell(a) ; tell(b) ; tell(c) .");
  EXPECT_EQ(m.procs.at("A").body,
            seq(seq(tell(tok("a")), tell(tok("b"))), tell(tok("c"))));
  Model c = parse_program("proc A = tell(a) + tell(b) + tell(c) .");
  EXPECT_EQ(c.procs.at("A").body,
            choice(choice(tell(tok("a")), tell(tok("b"))), tell(tok("c"))));
}

TEST(Parser, SumsFormalsAndCalls) {
  Model m = parse_program(
      "proc Q(X,Y) = tell(pair(X,Y)) .\n"
      "proc P = sum Z in [a,b,c] { get(m(Z)) ; Q(Z,na) } .");
  EXPECT_EQ(m.procs.at("Q").formals, (std::vector<std::string>{"X", "Y"}));
  Agent expected =
      gsum("Z", {tok("a"), tok("b"), tok("c")},
           seq(get(compound("m", {var("Z")})),
               call("Q", {var("Z"), tok("na")})));
  EXPECT_EQ(m.procs.at("P").body, expected);
}

TEST(Parser, CommentsAndWhitespaceAreSkipped) {
  Model m = parse_program(
      "# leading note\n"
      "proc P =   tell(a)   # trailing note\n"
      "  ; tell(b) .  # done\n");
  EXPECT_EQ(m.procs.at("P").body, seq(tell(tok("a")), tell(tok("b"))));
}

TEST(Parser, RunDirectiveSelectsEntryAndGoal) {
  Model m = parse_program(
      "proc Main = tell(a) .\n"
      "form G = bf(a) .\n"
      "run Main with G .");
  EXPECT_EQ(m.entry, "Main");
  EXPECT_EQ(m.goal, "G");
  Model no_goal = parse_program("proc Main = tell(a) .\nrun Main .");
  EXPECT_EQ(no_goal.entry, "Main");
  EXPECT_FALSE(no_goal.goal.has_value());
}

TEST(Parser, ProtocolIsTheDefaultEntry) {
  Model m = parse_program("proc Protocol = tell(a) .");
  EXPECT_EQ(m.entry, "Protocol");
  // A parameterized Protocol cannot be the implicit entry point.
  Model p = parse_program("proc Protocol(X) = tell(f(X)) .\nproc Q = tell(a) .");
  EXPECT_FALSE(p.entry.has_value());
}

TEST(Parser, FormulaPrecedenceAndGrouping) {
  Model m = parse_program(
      "form inproper = !(bf(a_running(bob)) | bf(b_running(alice))) .\n"
      "form ending = bf(b_commit(alice)) .\n"
      "form F = (inproper ; F) + ending .");
  BslFormula expected =
      fchoice(fseq(fvar("inproper"), fvar("F")), fvar("ending"));
  EXPECT_EQ(m.formulae.at("F"), expected);
  // Same tree without the redundant parentheses.
  Model bare = parse_program(
      "form inproper = !bf(x) .\n"
      "form ending = bf(y) .\n"
      "form F = inproper ; F + ending .");
  EXPECT_EQ(bare.formulae.at("F"),
            fchoice(fseq(fvar("inproper"), fvar("F")), fvar("ending")));
}

TEST(Parser, ParenthesizedBasicVersusGroupedFormula) {
  // A parenthesis can open a basic formula or group compound formulae; the
  // parser must tell them apart by content.
  Model m = parse_program("form G = (bf(a) | bf(b)) .");
  EXPECT_EQ(m.formulae.at("G"), basic(bf(tok("a")) | bf(tok("b"))));
  Model g = parse_program(
      "form A = bf(a) .\n"
      "form B = bf(b) .\n"
      "form H = (A ; B) + bf(c) .");
  EXPECT_EQ(g.formulae.at("H"),
            fchoice(fseq(fvar("A"), fvar("B")), basic(bf(tok("c")))));
  Model mixed = parse_program("form K = (bf(a) & bf(b)) ; bf(c) .");
  EXPECT_EQ(mixed.formulae.at("K"),
            fseq(basic(bf(tok("a")) & bf(tok("b"))), basic(bf(tok("c")))));
}

TEST(Parser, SyntaxErrorsCarryPositions) {
  try {
    parse_program("proc P = tell(a");
    FAIL() << "unterminated primitive accepted";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 16);
  }
  try {
    parse_program("proc P = tell(a) .\nproc Q = %tell(b) .");
    FAIL() << "bad character accepted";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 10);
  }
  try {
    parse_program("proc P = tell(a) tell(b) .");
    FAIL() << "missing operator accepted";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 18);
  }
}

TEST(Parser, RejectsMalformedDeclarations) {
  EXPECT_THROW(parse_program("proc P = tell(a) ."
                             "proc P = tell(b) ."),
               DuplicateDefinitionError);
  EXPECT_THROW(parse_program("form F = bf(a) . form F = bf(b) ."),
               DuplicateDefinitionError);
  EXPECT_THROW(parse_program("proc P = tell(a) . run P . run P ."),
               SyntaxError);
  EXPECT_THROW(parse_program("proc P(x) = tell(a) ."), SyntaxError);
  EXPECT_THROW(parse_program("proc tell = tell(a) ."), SyntaxError);
  EXPECT_THROW(parse_program("sum X in [a] { tell(a) }"), SyntaxError);
  EXPECT_THROW(parse_program("proc P = E ."), ValidationError);
}

TEST(Parser, RejectsSemanticErrorsAfterParsing) {
  EXPECT_THROW(parse_program("proc P = P + tell(a) ."),
               UnguardedRecursionError);
  EXPECT_THROW(parse_program("proc P = tell(a) ; Q ."),
               UnknownProcedureError);
  EXPECT_THROW(parse_program("proc Q(X) = tell(f(X)) .\n"
                             "proc P = tell(a) ; Q ."),
               ArityError);
  EXPECT_THROW(parse_program("proc P = tell(f(X)) ."), UnboundVariableError);
  EXPECT_THROW(parse_program("form G = G + bf(a) ."), UnguardedFormulaError);
  EXPECT_THROW(parse_program("proc P = tell(a) .\nrun Missing ."),
               UnknownProcedureError);
  EXPECT_THROW(parse_program("proc P = tell(a) .\nrun P with Missing ."),
               UnknownFormulaVariableError);
  EXPECT_THROW(parse_program("proc P(X) = tell(f(X)) .\nrun P ."), ArityError);
}

TEST(Parser, SumValidation) {
  EXPECT_THROW(parse_program("proc P = sum x in [a] { tell(x) } ."),
               SyntaxError);
  EXPECT_THROW(parse_program("proc P = sum X in [Y] { tell(f(X)) } ."),
               SyntaxError);
  EXPECT_THROW(parse_program("proc P = sum X in [f(Y)] { tell(f(X)) } ."),
               SyntaxError);
  // Binder shadowing a formal is rejected after parsing.
  EXPECT_THROW(
      parse_program("proc P(X) = tell(f(X)) ; sum X in [a] { tell(g(X)) } ."),
      ValidationError);
}

TEST(Parser, TermsInsidePrimitives) {
  Model m = parse_program(
      "proc P = tell(message(alice,bob,encrypt_i(na,alice,pkb))) .");
  EXPECT_EQ(render(m.procs.at("P").body.term()),
            "message(alice,bob,encrypt_i(na,alice,pkb))");
  EXPECT_THROW(parse_program("proc P = tell(f()) ."), SyntaxError);
  EXPECT_THROW(parse_program("proc P = tell(X(a)) ."), SyntaxError);
  EXPECT_THROW(parse_program("form F = bf(f(X)) ."), SyntaxError);
}

TEST(Parser, StandaloneTerms) {
  EXPECT_EQ(parse_term("na"), tok("na"));
  EXPECT_EQ(parse_term("f(a,g(b),c)"),
            compound("f", {tok("a"), compound("g", {tok("b")}), tok("c")}));
  EXPECT_EQ(parse_term("WNonce"), var("WNonce"));
  EXPECT_THROW(parse_term("f(a) b"), SyntaxError);
  EXPECT_THROW(parse_term(""), SyntaxError);
  EXPECT_THROW(parse_term("f(,a)"), SyntaxError);
}

TEST(Parser, PrettyRoundTripsTheAttackModel) {
  Model m = build_ns_model();
  Model again = parse_program(pretty(m));
  EXPECT_EQ(again, m);
  Model honest = build_honest_model();
  EXPECT_EQ(parse_program(pretty(honest)), honest);
}

TEST(Parser, PrettyRoundTripsRandomModels) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    Model m = testgen::random_model(rng);
    Model again = parse_program(pretty(m));
    EXPECT_EQ(again, m) << pretty(m);
  }
}

TEST(Parser, PrettyEmitsOneDeclarationPerLine) {
  Model m = parse_program(
      "proc Main = tell(a) .\n"
      "form G = bf(a) .\n"
      "run Main with G .");
  EXPECT_EQ(pretty(m),
            "proc Main = tell(a) .\n"
            "form G = bf(a) .\n"
            "run Main with G .\n");
}

}  // namespace
}  // namespace bach
