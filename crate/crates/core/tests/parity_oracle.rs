//! The parity solver against exhaustive search over positional strategies
//! of the existential player, on small random games.

use polymu::automata::{solve_parity, verify_strategy, ParityGame, Player};
use polymu::corpus::rng_for;
use proptest::prelude::*;
use rand::Rng;

fn random_game(seed: u64) -> ParityGame {
    let mut rng = rng_for(seed, 0);
    let n = rng.gen_range(1..=7);
    let owner = (0..n)
        .map(|_| if rng.gen_bool(0.5) { Player::Exists } else { Player::Forall })
        .collect();
    let priority = (0..n).map(|_| rng.gen_range(0..5)).collect();
    let moves = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..=3usize.min(n));
            let mut m: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            m.sort_unstable();
            m.dedup();
            m
        })
        .collect();
    ParityGame {
        owner,
        priority,
        moves,
        initial: 0,
    }
}

/// With `choice` fixed for the existential player, does every play from
/// `start` end in a stuck universal position or cycle with an even maximum?
fn exists_wins_with(game: &ParityGame, choice: &[Option<usize>], start: usize) -> bool {
    let n = game.len();
    let next = |v: usize| -> Vec<usize> {
        match game.owner[v] {
            Player::Exists => choice[v].into_iter().collect(),
            Player::Forall => game.moves[v].clone(),
        }
    };
    let mut reach = vec![false; n];
    let mut stack = vec![start];
    reach[start] = true;
    while let Some(v) = stack.pop() {
        for w in next(v) {
            if !reach[w] {
                reach[w] = true;
                stack.push(w);
            }
        }
    }
    for v in (0..n).filter(|&v| reach[v]) {
        if game.owner[v] == Player::Exists && choice[v].is_none() {
            return false;
        }
    }
    // an odd position that returns to itself through positions of
    // priority at most its own is a losing cycle
    for u in (0..n).filter(|&u| reach[u] && game.priority[u] % 2 == 1) {
        let p = game.priority[u];
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = next(u).into_iter().filter(|&w| game.priority[w] <= p).collect();
        while let Some(v) = stack.pop() {
            if v == u {
                return false;
            }
            if seen[v] {
                continue;
            }
            seen[v] = true;
            stack.extend(next(v).into_iter().filter(|&w| game.priority[w] <= p));
        }
    }
    true
}

fn brute_force_winners(game: &ParityGame) -> Vec<Player> {
    let n = game.len();
    let exists: Vec<usize> = (0..n).filter(|&v| game.owner[v] == Player::Exists).collect();
    let mut won = vec![false; n];
    let mut idx = vec![0usize; exists.len()];
    loop {
        let mut choice = vec![None; n];
        for (k, &v) in exists.iter().enumerate() {
            choice[v] = game.moves[v].get(idx[k]).copied();
        }
        for (v, w) in won.iter_mut().enumerate() {
            if !*w && exists_wins_with(game, &choice, v) {
                *w = true;
            }
        }
        // next strategy in mixed radix
        let mut k = 0;
        loop {
            if k == exists.len() {
                return won
                    .into_iter()
                    .map(|w| if w { Player::Exists } else { Player::Forall })
                    .collect();
            }
            idx[k] += 1;
            if idx[k] < game.moves[exists[k]].len().max(1) {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn solver_matches_exhaustive_search() {
    for seed in 0..400 {
        let game = random_game(seed);
        let sol = solve_parity(&game);
        assert_eq!(sol.winner, brute_force_winners(&game), "{game:?}");
        assert!(verify_strategy(&game, &sol, Player::Exists), "{game:?}");
        assert!(verify_strategy(&game, &sol, Player::Forall), "{game:?}");
    }
}

proptest! {
    #[test]
    fn strategies_are_winning(seed in any::<u64>()) {
        let game = random_game(seed);
        let sol = solve_parity(&game);
        prop_assert!(verify_strategy(&game, &sol, Player::Exists));
        prop_assert!(verify_strategy(&game, &sol, Player::Forall));
    }

    #[test]
    fn a_flipped_strategy_move_is_caught(seed in any::<u64>()) {
        let game = random_game(seed);
        let mut sol = solve_parity(&game);
        // redirect one winning move of the existential player out of its region
        let bad = (0..game.len()).find_map(|v| {
            let ours = sol.winner[v] == Player::Exists && game.owner[v] == Player::Exists;
            let out = game.moves[v].iter().find(|&&w| sol.winner[w] == Player::Forall);
            if ours { out.map(|&w| (v, w)) } else { None }
        });
        if let Some((v, w)) = bad {
            sol.strategy[v] = Some(w);
            prop_assert!(!verify_strategy(&game, &sol, Player::Exists));
        }
    }
}
