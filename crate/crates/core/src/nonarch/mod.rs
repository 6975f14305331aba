//! Potential theory at a finite prime: points of the Berkovich line as
//! closed disks, the canonical kernel on them, piecewise affine functions
//! on finite subtrees, and exact p-adic pair sums.

pub mod escape;
pub mod fekete_p;
pub mod skeleton;
pub mod tree;

pub use escape::{green_escape_p, EscapeP};
pub use fekete_p::{
    can_kernel_exp, fekete_sum_p, local_identity_check_p, msharp_p, rational_support,
    SmoothedKernelP, SupportPoint,
};
pub use skeleton::{median, radius_exp_below, small_metric, SkeletonPoint};
pub use tree::{close_under_joins, TreeFunction};
