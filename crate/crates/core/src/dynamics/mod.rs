//! Closed propagation over piecewise-constant schedules and open-system
//! Lindblad evolution, both sampled into a [`Trajectory`].

mod lindblad;
mod rk45;
mod schedule;

pub use lindblad::{
    build_collapse_set, lindblad_evolve, lindblad_evolve_with, CollapseChannel, CollapseSet, LindbladOptions,
};
pub use rk45::{DormandPrince, StepStats};
pub use schedule::{
    evolve_schedule, evolve_schedule_observed, Observable, Schedule, Segment, Trajectory, TrajectoryStates,
    DEFAULT_SAMPLES,
};
