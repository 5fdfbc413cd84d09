//! What each named check measures and why its tolerance is set where it is.

use crate::error::{CliError, CliResult};

pub struct CheckInfo {
    pub name: &'static str,
    pub module: &'static str,
    pub identity: &'static str,
    pub measured: &'static str,
    pub rationale: &'static str,
}

pub const CHECKS: &[CheckInfo] = &[
    CheckInfo {
        name: "kernel_normalization",
        module: "poisson",
        identity: "The Poisson kernel integrates to the identity matrix over the boundary hyperplane.",
        measured: "Largest entrywise deviation of the box trapezoid integral plus a fitted tail from I.",
        rationale: "1e-3 covers the tail fit, whose O(|x'|^-2) correction is removed by one Richardson step.",
    },
    CheckInfo {
        name: "kernel_annihilation",
        module: "poisson",
        identity: "Each column of the extension K(x', t) solves L u = 0 in the upper half-space.",
        measured: "Worst relative residual of fourth-order differences of L applied to K at interior points.",
        rationale: "1e-6 sits above the truncation error of the stencil at step 1e-3 and below any real defect.",
    },
    CheckInfo {
        name: "kernel_decay_constant",
        module: "poisson",
        identity: "|P(x')| (1 + |x'|^2)^{n/2} stays bounded on the boundary.",
        measured: "Relative drift of the sampled supremum between 200 and 800 radial samples out to |x'| = 1e3.",
        rationale: "1e-2 accepts sampling jitter of the supremum while rejecting growth.",
    },
    CheckInfo {
        name: "kernel_route_agreement",
        module: "poisson",
        identity: "P equals twice the conormal contraction of the fundamental-solution gradient at (x', 1).",
        measured: "Worst relative gap on |x'| <= 5 between the closed kernel and the kernel built from the quadrature fundamental solution.",
        rationale: "1e-5 bounds the finite-difference gradient of the quadrature route.",
    },
    CheckInfo {
        name: "semigroup",
        module: "generator",
        identity: "T(t1) T(t2) f = T(t1 + t2) f.",
        measured: "Relative discrete L2 gap between the two sides.",
        rationale: "1e-5 for Gaussian data on a box large enough that the truncated kernel tail is negligible.",
    },
    CheckInfo {
        name: "route_agreement",
        module: "generator",
        identity: "The Dirichlet-to-Normal map A f is the same operator by every route.",
        measured: "Relative L2 gap on the central half of the box for each pair of routes.",
        rationale: "1e-2 (2e-2 outside the Laplacian) is set by the difference-quotient route, whose extrapolated error dominates.",
    },
    CheckInfo {
        name: "power_trace",
        module: "generator",
        identity: "A^k f is the k-th normal derivative at the boundary of the Poisson extension of f.",
        measured: "Relative L2 gap between k-fold application of A and k-th time differences of T(t) f extrapolated to t = 0.",
        rationale: "5e-2 because k-th differences amplify the discretization error like h^-k.",
    },
    CheckInfo {
        name: "block_identity",
        module: "generator",
        identity: "A^2 f = -L' f when L is the sum of the second normal derivative and a tangential operator L'.",
        measured: "||A(A f) + L' f|| / ||L' f|| with A from the pv or quotient route.",
        rationale: "2e-2 is the accuracy of two successive first-order applications.",
    },
    CheckInfo {
        name: "block_identity_spectral",
        module: "generator",
        identity: "A^2 f = -L' f on the multiplier level.",
        measured: "The same ratio with the spectral route.",
        rationale: "1e-8: squaring the multiplier is exact up to roundoff.",
    },
    CheckInfo {
        name: "conormal",
        module: "elliptic",
        identity: "The conormal derivative of the fundamental solution vanishes on the boundary hyperplane away from the origin.",
        measured: "Worst |x'|^{n-1}-scaled residual over boundary samples.",
        rationale: "1e-10 with analytic gradients; 1e-6 when gradients come from the quadrature route.",
    },
    CheckInfo {
        name: "symbol_conditions",
        module: "elliptic",
        identity: "The inverse symbol satisfies the sufficient algebraic conditions for conormal vanishing.",
        measured: "Worst residual over sphere samples, plus the circle-integral condition when n = 2.",
        rationale: "1e-8 separates roundoff in the symbol algebra from a genuine failure.",
    },
];

pub fn lookup(name: &str) -> CliResult<&'static CheckInfo> {
    CHECKS.iter().find(|c| c.name == name).ok_or_else(|| {
        CliError::UnknownCheck(name.to_string(), CHECKS.iter().map(|c| c.name).collect::<Vec<_>>().join(", "))
    })
}

pub fn explain(name: &str) -> CliResult<String> {
    let info = lookup(name)?;
    Ok(format!(
        "{}\n  module:    {}\n  identity:  {}\n  measured:  {}\n  tolerance: {}\n",
        info.name, info.module, info.identity, info.measured, info.rationale
    ))
}
