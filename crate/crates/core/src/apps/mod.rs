//! Applications built on the distances: gradient flows and rigid registration.

pub mod flow;
pub mod registration;

pub use flow::{gradient_flow, FlowConfig, FlowLoss, FlowRecord, FlowTrace};
pub use registration::{
    chamfer, frobenius_gap, icp, procrustes, Correspondence, IcpConfig, IcpDiagnostics, IcpResult, RigidTransform,
};
