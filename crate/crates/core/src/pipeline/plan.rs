use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::swap::Provenance;

/// The five workflow tasks, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Read simulation parameters (config file and command line).
    Input,
    ReadTrajectory,
    /// Select and pair atom segments per frame.
    EvolveSegments,
    /// Inter-atomic squared distances into the block distance matrix.
    Distance,
    /// Largest eigenvalue of the block distance matrix.
    Eigen,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::Input,
        Task::ReadTrajectory,
        Task::EvolveSegments,
        Task::Distance,
        Task::Eigen,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    /// Only the numeric tasks have a quantum subroutine; the I/O and
    /// bookkeeping tasks stay classical.
    pub fn classification(self) -> Classification {
        match self {
            Task::Distance | Task::Eigen => Classification::QuantumCandidate,
            _ => Classification::Classic,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Classic,
    QuantumCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedTask {
    pub task: Task,
    pub classification: Classification,
    /// Variant dispatched at run time.
    pub variant: Provenance,
}

/// Partition of the workflow into quantum candidates and classic tasks,
/// with the variant chosen for each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskPlan {
    pub tasks: Vec<PlannedTask>,
}

impl TaskPlan {
    /// Build a plan from requested variants; unspecified tasks run
    /// classically.
    pub fn from_requests(requests: &BTreeMap<Task, Provenance>) -> Result<Self> {
        let mut tasks = Vec::with_capacity(Task::ALL.len());
        for task in Task::ALL {
            let classification = task.classification();
            let variant = requests
                .get(&task)
                .copied()
                .unwrap_or(Provenance::Classical);
            if variant == Provenance::Quantum && classification == Classification::Classic {
                return Err(Error::config(format!(
                    "{task} is a classic task and has no quantum variant"
                )));
            }
            tasks.push(PlannedTask {
                task,
                classification,
                variant,
            });
        }
        Ok(Self { tasks })
    }

    pub fn new(distance: Provenance, eigen: Provenance) -> Self {
        let requests = BTreeMap::from([(Task::Distance, distance), (Task::Eigen, eigen)]);
        Self::from_requests(&requests).expect("candidate tasks accept either variant")
    }

    /// The candidate set C.
    pub fn candidates(&self) -> Vec<Task> {
        self.with_class(Classification::QuantumCandidate)
    }

    /// The classic set T.
    pub fn classic(&self) -> Vec<Task> {
        self.with_class(Classification::Classic)
    }

    pub fn variant(&self, task: Task) -> Provenance {
        self.tasks
            .iter()
            .find(|t| t.task == task)
            .map_or(Provenance::Classical, |t| t.variant)
    }

    fn with_class(&self, class: Classification) -> Vec<Task> {
        self.tasks
            .iter()
            .filter(|t| t.classification == class)
            .map(|t| t.task)
            .collect()
    }
}
