#ifndef ATTN_CATALOG_H_
#define ATTN_CATALOG_H_

// Small named environments used by the tests, the CLI's built-in scenarios and
// the demos.

#include "attn/decision.h"
#include "attn/environment.h"

namespace attn {

// Two fair coins; the receiver guesses whether they match. Components are
// complements: neither coin alone is worth anything.
Environment coin_match();

// Two iid coins with P(H) = q; the receiver guesses both and earns one unit
// per correct guess.
Environment pair_guess(double q = 0.7);

// One sender whose component is the hypothesis itself. Accepting H0 when H1
// is true costs beta, rejecting H0 when it is true costs alpha.
// q = P(H1).
Environment hypothesis_testing(double alpha = 1.0, double beta = 1.0, double q = 0.5);

// Binary payoff state with prior P(w0 = 1) = prior_one and n conditionally
// iid binary signals of the given accuracy. Actions guess-0, guess-1 and an
// abstain action with a sure payoff.
Environment binary_signals(double accuracy = 0.8, int num_senders = 2, double abstain = 0.55,
                           double prior_one = 0.5);

}  // namespace attn

#endif  // ATTN_CATALOG_H_
