use std::sync::Arc;

use crate::domain::{CotInstance, Label, VerifierClass};
use crate::error::{Error, Result};
use crate::families::RiverCrossing;

use super::CotLearner;

/// Accepts paths built from revealed edges and edges it has learned; learns
/// the edge at the flagged step whenever it wrongly flags a step.
#[derive(Clone, Debug)]
pub struct RiverLearner {
    puzzle: Arc<RiverCrossing>,
    class: Arc<VerifierClass>,
    learned: Vec<bool>,
}

impl RiverLearner {
    /// `class` must be the puzzle's own class.
    pub fn new(puzzle: Arc<RiverCrossing>, class: Arc<VerifierClass>) -> Result<Self> {
        if *class != puzzle.class {
            return Err(Error::ClassMismatch);
        }
        let learned = vec![false; puzzle.edges().len()];
        Ok(RiverLearner {
            puzzle,
            class,
            learned,
        })
    }

    /// Edges learned so far.
    pub fn learned(&self) -> Vec<(u16, u16)> {
        self.puzzle
            .edges()
            .iter()
            .zip(&self.learned)
            .filter(|(_, &on)| on)
            .map(|(e, _)| *e)
            .collect()
    }

    fn accepted(&self) -> Vec<bool> {
        (0..self.learned.len())
            .map(|e| self.learned[e] || self.puzzle.is_revealed(e))
            .collect()
    }
}

impl CotLearner for RiverLearner {
    fn class(&self) -> &Arc<VerifierClass> {
        &self.class
    }

    fn predict(&self, z: &CotInstance) -> Result<Label> {
        self.class.cot_index_of(z)?;
        let accepted = self.accepted();
        Ok((1..=z.len())
            .find(|&l| !self.puzzle.accepts_with(&accepted, &z.prefix(l)))
            .map_or(Label::AllCorrect, |l| Label::FaultAt(l as u16)))
    }

    fn update(&mut self, z: &CotInstance, truth: Label) -> Result<()> {
        if let Label::FaultAt(i) = self.predict(z)? {
            if truth > Label::FaultAt(i) {
                let i = i as usize;
                let edge = (i >= 2)
                    .then(|| self.puzzle.edge_id(z.steps[i - 2], z.steps[i - 1]))
                    .flatten()
                    .ok_or(Error::EmptyVersionSpace)?;
                self.learned[edge] = true;
            }
        }
        Ok(())
    }
}
