use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The player who wins plays whose top recurring priority is `p`.
    pub fn of_priority(p: usize) -> Player {
        if p.is_multiple_of(2) {
            Player::Exists
        } else {
            Player::Forall
        }
    }

    fn idx(self) -> usize {
        match self {
            Player::Exists => 0,
            Player::Forall => 1,
        }
    }
}

/// A finite max-parity game. A player without moves loses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<usize>,
    pub moves: Vec<Vec<usize>>,
    pub initial: usize,
}

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (u, ms) in self.moves.iter().enumerate() {
            for &v in ms {
                pred[v].push(u);
            }
        }
        pred
    }
}

/// Winning regions and positional strategies for both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Winner of every position.
    pub winner: Vec<Player>,
    /// For each position owned by its winner, the move to take (absent for
    /// positions the owner loses, and for winning dead ends of the opponent).
    pub strategy: Vec<Option<usize>>,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == p).collect()
    }
}

struct Solver<'g> {
    game: &'g ParityGame,
    pred: Vec<Vec<usize>>,
    strategy: Vec<Option<usize>>,
}

impl<'g> Solver<'g> {
    /// Positions in `alive` from which `p` can force a visit to `target`
    /// (or to an opponent dead end). Records attractor moves for `p`.
    fn attractor(&mut self, alive: &[bool], target: &[usize], p: Player) -> Vec<bool> {
        let g = self.game;
        let mut inside = vec![false; g.len()];
        let mut queue = VecDeque::new();
        let mut remaining: Vec<usize> = (0..g.len())
            .map(|v| g.moves[v].iter().filter(|&&w| alive[w]).count())
            .collect();
        for &t in target {
            if alive[t] && !inside[t] {
                inside[t] = true;
                queue.push_back(t);
            }
        }
        for v in 0..g.len() {
            if alive[v] && !inside[v] && g.owner[v] != p && remaining[v] == 0 {
                inside[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(w) = queue.pop_front() {
            for &u in &self.pred[w] {
                if !alive[u] || inside[u] {
                    continue;
                }
                if g.owner[u] == p {
                    inside[u] = true;
                    self.strategy[u] = Some(w);
                    queue.push_back(u);
                } else {
                    remaining[u] -= 1;
                    if remaining[u] == 0 {
                        inside[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        inside
    }

    /// Zielonka's recursion; returns the winning region of each player.
    fn solve(&mut self, alive: &[bool]) -> [Vec<bool>; 2] {
        let g = self.game;
        let n = g.len();
        let Some(top) = (0..n).filter(|&v| alive[v]).map(|v| g.priority[v]).max() else {
            return [vec![false; n], vec![false; n]];
        };
        let p = Player::of_priority(top);
        let q = p.opponent();
        let u: Vec<usize> = (0..n).filter(|&v| alive[v] && g.priority[v] == top).collect();
        let a = self.attractor(alive, &u, p);
        let rest: Vec<bool> = (0..n).map(|v| alive[v] && !a[v]).collect();
        let sub = self.solve(&rest);
        if !sub[q.idx()].iter().any(|&b| b) {
            // p wins everywhere; top-priority positions of p may move anywhere alive
            for &v in &u {
                if g.owner[v] == p {
                    if let Some(&w) = g.moves[v].iter().find(|&&w| alive[w]) {
                        self.strategy[v] = Some(w);
                    }
                }
            }
            let mut won = [vec![false; n], vec![false; n]];
            won[p.idx()] = alive.to_vec();
            return won;
        }
        let opp_won: Vec<usize> = (0..n).filter(|&v| sub[q.idx()][v]).collect();
        let b = self.attractor(alive, &opp_won, q);
        let rest2: Vec<bool> = (0..n).map(|v| alive[v] && !b[v]).collect();
        let mut won = self.solve(&rest2);
        for v in 0..n {
            if b[v] {
                won[q.idx()][v] = true;
            }
        }
        won
    }
}

/// Solves `game` by recursive attractor decomposition.
pub fn solve_parity(game: &ParityGame) -> Solution {
    let n = game.len();
    let mut solver = Solver {
        game,
        pred: game.predecessors(),
        strategy: vec![None; n],
    };
    // peel off forced wins by getting the opponent stuck; what remains is
    // a game where every position has a move
    let all = vec![true; n];
    let exists_forced = solver.attractor(&all, &[], Player::Exists);
    let rest: Vec<bool> = (0..n).map(|v| !exists_forced[v]).collect();
    let forall_forced = solver.attractor(&rest, &[], Player::Forall);
    let core: Vec<bool> = (0..n).map(|v| rest[v] && !forall_forced[v]).collect();
    let won = solver.solve(&core);
    let winner: Vec<Player> = (0..n)
        .map(|v| {
            if exists_forced[v] || won[0][v] {
                Player::Exists
            } else {
                Player::Forall
            }
        })
        .collect();
    let strategy = (0..n)
        .map(|v| {
            if game.owner[v] == winner[v] {
                solver.strategy[v]
            } else {
                None
            }
        })
        .collect();
    Solution { winner, strategy }
}

/// Checks that the strategy of `p` wins from every position in its region:
/// the region is closed under opponent moves and strategy moves, `p` is
/// never stuck, and every cycle in the restricted graph has a top priority
/// of `p`'s parity.
pub fn verify_strategy(game: &ParityGame, sol: &Solution, p: Player) -> bool {
    let n = game.len();
    let mine = |v: usize| sol.winner[v] == p;
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| mine(v)) {
        if game.owner[v] == p {
            match sol.strategy[v] {
                Some(w) if game.moves[v].contains(&w) && mine(w) => edges[v].push(w),
                _ => return false,
            }
        } else {
            if game.moves[v].iter().any(|&w| !mine(w)) {
                return false;
            }
            edges[v].extend(&game.moves[v]);
        }
    }
    no_losing_cycle(game, &edges, p)
}

/// True iff no cycle through `edges` has a top priority losing for `p`.
pub(crate) fn no_losing_cycle(game: &ParityGame, edges: &[Vec<usize>], p: Player) -> bool {
    let n = game.len();
    let mut bad: Vec<usize> = (0..n)
        .map(|v| game.priority[v])
        .filter(|&q| Player::of_priority(q) != p)
        .collect();
    bad.sort_unstable();
    bad.dedup();
    for &level in &bad {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for v in (0..n).filter(|&v| game.priority[v] <= level) {
            for &w in edges[v].iter().filter(|&&w| game.priority[w] <= level) {
                g.add_edge(nodes[v], nodes[w], ());
            }
        }
        for scc in tarjan_scc(&g) {
            let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
            if cyclic && scc.iter().any(|x| game.priority[x.index()] == level) {
                return false;
            }
        }
    }
    true
}
