#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bach/agent.hpp"
#include "bach/errors.hpp"
#include "bach/interpreter.hpp"
#include "bach/logic.hpp"
#include "bach/parser.hpp"
#include "bach/term.hpp"

namespace bach {

/// Fixed vocabulary of the built-in Needham–Schroeder model: three nonces,
/// three public keys, three principals.
struct NsVocabulary {
  SiTerm na, nb, nm;
  SiTerm pka, pkb, pkm;
  SiTerm alice, bob, mallory;
};

inline const NsVocabulary& ns_vocabulary() {
  static const NsVocabulary v{token("na"),  token("nb"),  token("nm"),
                              token("pka"), token("pkb"), token("pkm"),
                              token("alice"), token("bob"), token("mallory")};
  return v;
}

/// alice -> pka, bob -> pkb, mallory -> pkm.
inline SiTerm public_key(const SiTerm& principal) {
  const NsVocabulary& v = ns_vocabulary();
  if (principal == v.alice) {
    return v.pka;
  }
  if (principal == v.bob) {
    return v.pkb;
  }
  if (principal == v.mallory) {
    return v.pkm;
  }
  throw Error("public_key: unknown principal " + render(principal));
}

// Message payloads of the three protocol steps and the session markers.
inline SiTerm encrypt_i(SiTerm nonce, SiTerm agent, SiTerm key) {
  return compound("encrypt_i", {std::move(nonce), std::move(agent), std::move(key)});
}
inline SiTerm encrypt_ii(SiTerm nonce1, SiTerm nonce2, SiTerm key) {
  return compound("encrypt_ii", {std::move(nonce1), std::move(nonce2), std::move(key)});
}
inline SiTerm encrypt_iii(SiTerm nonce, SiTerm key) {
  return compound("encrypt_iii", {std::move(nonce), std::move(key)});
}
inline SiTerm message(SiTerm sender, SiTerm receiver, SiTerm payload) {
  return compound("message", {std::move(sender), std::move(receiver), std::move(payload)});
}
inline SiTerm a_running(SiTerm partner) {
  return compound("a_running", {std::move(partner)});
}
inline SiTerm b_running(SiTerm partner) {
  return compound("b_running", {std::move(partner)});
}
inline SiTerm a_commit(SiTerm partner) {
  return compound("a_commit", {std::move(partner)});
}
inline SiTerm b_commit(SiTerm partner) {
  return compound("b_commit", {std::move(partner)});
}

namespace detail {

// Alice's behavior toward one chosen partner y. The partner's key is fixed
// per branch, so the sum over partners is expanded to a binary choice at
// build time; only the inner sum over the nonce received in message ii
// remains a real binder.
inline Agent ns_alice_case(const SiTerm& y, const SiTerm& pky) {
  const NsVocabulary& v = ns_vocabulary();
  const SiTerm w = var("WNonce");
  return seq(
      seq(tell(a_running(y)),
          tell(message(v.alice, y, encrypt_i(v.na, v.alice, pky)))),
      gsum("WNonce", {v.na, v.nb, v.nm},
           seq(seq(get(message(y, v.alice, encrypt_ii(v.na, w, v.pka))),
                   tell(message(v.alice, y, encrypt_iii(w, pky)))),
               tell(a_commit(y)))));
}

// Bob's reaction to a claimed identity vag, whose key is fixed per branch.
// The sum over the claimed identity is expanded at build time; the sum over
// the apparent sender Y stays a binder.
inline Agent ns_bob_case(const SiTerm& vag, const SiTerm& key) {
  const NsVocabulary& v = ns_vocabulary();
  const SiTerm y = var("Y");
  return seq(seq(seq(get(message(y, v.bob, encrypt_i(v.na, vag, v.pkb))),
                     tell(message(v.bob, y, encrypt_ii(v.na, v.nb, key)))),
                 get(message(y, v.bob, encrypt_iii(v.nb, v.pkb)))),
             tell(b_commit(vag)));
}

// One relay case of Mallory: receive a payload under the key got_key and
// pass it on under put_key (equal keys mean an undecipherable payload is
// forwarded unchanged; pkm is swapped for the receiver's key).
inline Agent ns_mallory_case(const SiTerm& from, const SiTerm& to,
                             const SiTerm& got, const SiTerm& put) {
  const NsVocabulary& v = ns_vocabulary();
  return seq(seq(get(message(from, v.mallory, got)),
                 tell(message(v.mallory, to, put))),
             call("Mallory"));
}

}  // namespace detail

/// The man-in-the-middle model: Alice willing to talk to bob or mallory,
/// Bob accepting sessions claimed by alice or mallory, and Mallory relaying
/// and re-encrypting every message kind, under the formula F that rules out
/// any honestly started session until Bob commits to alice.
inline Model build_ns_model() {
  const NsVocabulary& v = ns_vocabulary();
  const std::vector<SiTerm> nonces{v.na, v.nb, v.nm};

  Model m;
  m.procs.define("Alice", {},
                 choice(detail::ns_alice_case(v.bob, v.pkb),
                        detail::ns_alice_case(v.mallory, v.pkm)));
  m.procs.define(
      "Bob", {},
      gsum("Y", {v.alice, v.mallory},
           seq(tell(b_running(var("Y"))),
               choice(detail::ns_bob_case(v.alice, v.pka),
                      detail::ns_bob_case(v.mallory, v.pkm)))));

  // Three relay branches, one per message kind. The key case VPK = pkm is
  // expanded to the re-encrypting tell, the other key cases forward the
  // payload untouched.
  const SiTerm vnonce = var("VNonce");
  const SiTerm vag = var("VAg");
  Agent branch_i = gsum(
      "VNonce", nonces,
      gsum("VAg", {v.alice, v.bob},
           choice(choice(detail::ns_mallory_case(
                             v.alice, v.bob, encrypt_i(vnonce, vag, v.pka),
                             encrypt_i(vnonce, vag, v.pka)),
                         detail::ns_mallory_case(
                             v.alice, v.bob, encrypt_i(vnonce, vag, v.pkb),
                             encrypt_i(vnonce, vag, v.pkb))),
                  detail::ns_mallory_case(
                      v.alice, v.bob, encrypt_i(vnonce, vag, v.pkm),
                      encrypt_i(vnonce, vag, v.pkb)))));

  const SiTerm vn1 = var("VN1");
  const SiTerm vn2 = var("VN2");
  Agent branch_ii = gsum(
      "VN1", nonces,
      gsum("VN2", nonces,
           choice(choice(detail::ns_mallory_case(
                             v.bob, v.alice, encrypt_ii(vn1, vn2, v.pka),
                             encrypt_ii(vn1, vn2, v.pka)),
                         detail::ns_mallory_case(
                             v.bob, v.alice, encrypt_ii(vn1, vn2, v.pkb),
                             encrypt_ii(vn1, vn2, v.pkb))),
                  detail::ns_mallory_case(
                      v.bob, v.alice, encrypt_ii(vn1, vn2, v.pkm),
                      encrypt_ii(vn1, vn2, v.pka)))));

  const SiTerm vn = var("VN");
  Agent branch_iii = gsum(
      "VN", nonces,
      choice(choice(detail::ns_mallory_case(v.alice, v.bob,
                                            encrypt_iii(vn, v.pka),
                                            encrypt_iii(vn, v.pka)),
                    detail::ns_mallory_case(v.alice, v.bob,
                                            encrypt_iii(vn, v.pkb),
                                            encrypt_iii(vn, v.pkb))),
             detail::ns_mallory_case(v.alice, v.bob, encrypt_iii(vn, v.pkm),
                                     encrypt_iii(vn, v.pkb))));

  m.procs.define("Mallory", {},
                 choice(choice(std::move(branch_i), std::move(branch_ii)),
                        std::move(branch_iii)));
  m.procs.define("Protocol", {},
                 par(par(call("Alice"), call("Bob")), call("Mallory")));

  m.formulae.define("inproper_init",
                    basic(!(bf(a_running(v.bob)) | bf(b_running(v.alice)))));
  m.formulae.define("end_session", basic(bf(b_commit(v.alice))));
  m.formulae.define("F", fchoice(fseq(fvar("inproper_init"), fvar("F")),
                                 fvar("end_session")));
  m.entry = "Protocol";
  m.goal = "F";
  finalize_model(m);
  return m;
}

/// The honest two-party variant: Mallory removed, Alice talking to bob only,
/// Bob accepting alice only. The goal formula states that b_commit(alice) is
/// eventually told: keep deriving while it is absent, stop once present.
inline Model build_honest_model() {
  const NsVocabulary& v = ns_vocabulary();
  Model m;
  m.procs.define("Alice", {}, detail::ns_alice_case(v.bob, v.pkb));
  m.procs.define("Bob", {},
                 gsum("Y", {v.alice},
                      seq(tell(b_running(var("Y"))),
                          detail::ns_bob_case(v.alice, v.pka))));
  m.procs.define("Protocol", {}, par(call("Alice"), call("Bob")));

  m.formulae.define("pending", basic(!bf(b_commit(v.alice))));
  m.formulae.define("session_complete", basic(bf(b_commit(v.alice))));
  m.formulae.define("Goal", fchoice(fseq(fvar("pending"), fvar("Goal")),
                                    fvar("session_complete")));
  m.entry = "Protocol";
  m.goal = "Goal";
  finalize_model(m);
  return m;
}

/// One message exchange of the protocol narrative: who appears to send, who
/// receives, and the encrypted payload.
struct Exchange {
  SiTerm sender;
  SiTerm receiver;
  SiTerm payload;

  friend bool operator==(const Exchange& a, const Exchange& b) {
    return a.sender == b.sender && a.receiver == b.receiver &&
           a.payload == b.payload;
  }
  friend bool operator!=(const Exchange& a, const Exchange& b) {
    return !(a == b);
  }
};

inline std::string render(const Exchange& e) {
  return render(e.sender) + " -> " + render(e.receiver) + " : " +
         render(e.payload);
}

/// The six exchanges of the Lowe attack, in protocol order.
inline std::vector<Exchange> expected_attack_summary() {
  const NsVocabulary& v = ns_vocabulary();
  return {
      {v.alice, v.mallory, encrypt_i(v.na, v.alice, v.pkm)},
      {v.mallory, v.bob, encrypt_i(v.na, v.alice, v.pkb)},
      {v.bob, v.mallory, encrypt_ii(v.na, v.nb, v.pka)},
      {v.mallory, v.alice, encrypt_ii(v.na, v.nb, v.pka)},
      {v.alice, v.mallory, encrypt_iii(v.nb, v.pkm)},
      {v.mallory, v.bob, encrypt_iii(v.nb, v.pkb)},
  };
}

/// The exchanges of a trace: every told message(sender,receiver,payload), in
/// trace order.
inline std::vector<Exchange> project_exchanges(
    const std::vector<StepLabel>& trace) {
  std::vector<Exchange> out;
  for (const StepLabel& l : trace) {
    if (l.kind == PrimKind::tell && l.term.is_compound() &&
        l.term.name() == "message" && l.term.args().size() == 3) {
      out.push_back(
          Exchange{l.term.args()[0], l.term.args()[1], l.term.args()[2]});
    }
  }
  return out;
}

/// True when every get of a message is preceded by a matching tell and every
/// told message is eventually consumed.
inline bool exchanges_fully_paired(const std::vector<StepLabel>& trace) {
  std::map<SiTerm, long> balance;
  for (const StepLabel& l : trace) {
    if (!(l.term.is_compound() && l.term.name() == "message" &&
          l.term.args().size() == 3)) {
      continue;
    }
    if (l.kind == PrimKind::tell) {
      ++balance[l.term];
    } else if (l.kind == PrimKind::get) {
      if (--balance[l.term] < 0) {
        return false;
      }
    }
  }
  for (const auto& [term, n] : balance) {
    if (n != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace bach
