#![allow(dead_code)]

use ptpmdl_core::{State, TreeStructure};

/// SplitMix64, enough randomness for test instances.
pub struct Rng(pub u64);

impl Rng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn bits(&mut self, n: usize, p1: f64) -> Vec<u8> {
        (0..n).map(|_| u8::from(self.unit() < p1)).collect()
    }
}

/// Random complete and proper structure with depth at most `max_depth`.
pub fn random_structure(rng: &mut Rng, max_depth: u32, split_p: f64) -> TreeStructure {
    fn walk(rng: &mut Rng, node: State, max_depth: u32, split_p: f64, out: &mut Vec<State>) {
        if node.len() < max_depth && rng.unit() < split_p {
            walk(rng, node.child(0), max_depth, split_p, out);
            walk(rng, node.child(1), max_depth, split_p, out);
        } else {
            out.push(node);
        }
    }
    let mut leaves = Vec::new();
    walk(rng, State::ROOT, max_depth, split_p, &mut leaves);
    TreeStructure::new(leaves).unwrap()
}

/// Every complete and proper structure of depth at most `depth`.
pub fn all_structures(depth: u32) -> Vec<Vec<State>> {
    fn below(node: State, depth: u32) -> Vec<Vec<State>> {
        let mut out = vec![vec![node]];
        if node.len() < depth {
            for left in below(node.child(0), depth) {
                for right in below(node.child(1), depth) {
                    let mut v = left.clone();
                    v.extend(right);
                    out.push(v);
                }
            }
        }
        out
    }
    below(State::ROOT, depth)
}
