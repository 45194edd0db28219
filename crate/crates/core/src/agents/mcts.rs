//! Monte Carlo tree search with UCB1 selection and random rollouts.

use rand::Rng as _;

use super::Agent;
use crate::compiler::CompiledGame;
use crate::dsl::ast::Player;
use crate::engine::rng::Rng;
use crate::engine::{GameState, StepError, DEFAULT_MAX_TURNS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MctsConfig {
    pub iterations: u32,
    /// UCB1 exploration constant.
    pub exploration: f64,
    /// Rollouts stop (as draws) once the move counter reaches this.
    pub max_turns: u32,
    /// Multiplier applied to every backed-up reward.
    pub reward_scale: f64,
}

impl Default for MctsConfig {
    fn default() -> Self {
        MctsConfig { iterations: 100, exploration: std::f64::consts::SQRT_2, max_turns: DEFAULT_MAX_TURNS, reward_scale: 1.0 }
    }
}

impl MctsConfig {
    pub fn with_iterations(iterations: u32) -> MctsConfig {
        MctsConfig { iterations, ..Default::default() }
    }
}

struct Node {
    action: u32,
    /// Player who took `action` to reach this node.
    actor: Player,
    children: Vec<u32>,
    untried: Vec<u32>,
    visits: u32,
    value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChildStats {
    pub action: u32,
    pub visits: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub action: u32,
    pub root_visits: u32,
    pub children: Vec<ChildStats>,
}

pub struct Mcts {
    pub config: MctsConfig,
    rng: Rng,
    nodes: Vec<Node>,
    legal: Vec<u32>,
}

impl Mcts {
    pub fn new(config: MctsConfig, rng: Rng) -> Mcts {
        Mcts { config, rng, nodes: Vec::new(), legal: Vec::new() }
    }

    fn new_node(&mut self, game: &CompiledGame, st: &GameState, action: u32, actor: Player) -> u32 {
        let untried = if st.terminated { Vec::new() } else { game.legal_actions(st) };
        self.nodes.push(Node { action, actor, children: Vec::new(), untried, visits: 0, value: 0.0 });
        (self.nodes.len() - 1) as u32
    }

    fn ucb_child(&self, node: u32) -> u32 {
        let parent = &self.nodes[node as usize];
        let ln_n = (parent.visits.max(1) as f64).ln();
        let c = self.config.exploration;
        let mut best = parent.children[0];
        let mut best_score = f64::NEG_INFINITY;
        for &ch in &parent.children {
            let n = &self.nodes[ch as usize];
            let score = if n.visits == 0 {
                f64::INFINITY
            } else {
                n.value / n.visits as f64 + c * (ln_n / n.visits as f64).sqrt()
            };
            if score > best_score {
                best_score = score;
                best = ch;
            }
        }
        best
    }

    /// Runs a full search from `root` and reports root statistics.
    pub fn search(&mut self, game: &CompiledGame, root: &GameState) -> Result<SearchResult, StepError> {
        if root.terminated {
            return Err(StepError::TerminalState);
        }
        self.nodes.clear();
        self.new_node(game, root, u32::MAX, root.mover.other());
        let mut path = Vec::new();
        let mut st = root.clone();
        for _ in 0..self.config.iterations.max(1) {
            st.copy_from(root);
            path.clear();
            let mut node = 0u32;
            path.push(node);
            while self.nodes[node as usize].untried.is_empty() && !self.nodes[node as usize].children.is_empty() {
                node = self.ucb_child(node);
                game.apply(&mut st, self.nodes[node as usize].action);
                crate::engine::playout::apply_cap(&mut st, self.config.max_turns);
                path.push(node);
            }
            // A node's first visit is a rollout from the node itself; only
            // later visits expand it.
            let fresh = self.nodes[node as usize].visits == 0;
            if !fresh && !st.terminated && !self.nodes[node as usize].untried.is_empty() {
                let untried = &mut self.nodes[node as usize].untried;
                let i = self.rng.random_range(0..untried.len());
                let action = untried.swap_remove(i);
                let actor = st.mover;
                game.apply(&mut st, action);
                crate::engine::playout::apply_cap(&mut st, self.config.max_turns);
                let child = self.new_node(game, &st, action, actor);
                self.nodes[node as usize].children.push(child);
                node = child;
                path.push(node);
            }
            let outcome = game.random_rollout(&mut st, &mut self.rng, self.config.max_turns, &mut self.legal);
            for &n in &path {
                let node = &mut self.nodes[n as usize];
                node.visits += 1;
                node.value += outcome.value(node.actor) * self.config.reward_scale;
            }
        }
        let root_node = &self.nodes[0];
        let mut children: Vec<ChildStats> = root_node
            .children
            .iter()
            .map(|&c| {
                let n = &self.nodes[c as usize];
                ChildStats { action: n.action, visits: n.visits, value: n.value }
            })
            .collect();
        children.sort_by_key(|c| c.action);
        let action = match children.iter().max_by(|a, b| a.visits.cmp(&b.visits).then(b.action.cmp(&a.action))) {
            Some(best) => best.action,
            None => {
                let untried = &self.nodes[0].untried;
                untried[self.rng.random_range(0..untried.len())]
            }
        };
        Ok(SearchResult { action, root_visits: root_node.visits, children })
    }

    /// `(visits, summed child visits, child count)` for every node of the
    /// last search tree.
    pub fn tree_visits(&self) -> Vec<(u32, u32, usize)> {
        self.nodes
            .iter()
            .map(|n| (n.visits, n.children.iter().map(|&c| self.nodes[c as usize].visits).sum(), n.children.len()))
            .collect()
    }
}

impl Agent for Mcts {
    fn select(&mut self, game: &CompiledGame, st: &GameState) -> u32 {
        self.search(game, st).expect("agents are only asked to move in live states").action
    }

    fn name(&self) -> String {
        format!("mcts-{}", self.config.iterations)
    }
}
