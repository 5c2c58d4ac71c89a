//! Seeded randomized checks behind the `fuzz-*` subcommands.

use rand::Rng;

use super::{Context, FuzzArgs, Outcome, Report};
use crate::contraction::{self, Contraction, Polynomial};
use crate::cp;
use crate::kernel::{self, FiniteKernel};
use crate::linalg::{self, Tolerance};
use crate::povm;
use crate::random::{self, DetRng};
use crate::subnormal::{self, CommutingTuple};
use crate::tower;

#[derive(Debug, Clone, Copy)]
pub enum Suite {
    Kernel,
    Cp,
    Stinespring,
    Naimark,
    Contraction,
    VonNeumann,
    Bram,
    Tower,
}

type Trial = Result<f64, String>;

pub fn run(name: &str, suite: Suite, args: &FuzzArgs, ctx: &Context) -> Outcome {
    let tol = ctx.tol(None)?;
    let mut rng = random::rng(args.seed);
    let mut worst = 0f64;
    let mut failures = 0usize;
    let mut first_failure: Option<(usize, String)> = None;
    for trial in 0..args.trials {
        let outcome = match suite {
            Suite::Kernel => kernel_trial(&mut rng, &tol),
            Suite::Cp => cp_trial(&mut rng, &tol),
            Suite::Stinespring => stinespring_trial(&mut rng, &tol),
            Suite::Naimark => naimark_trial(&mut rng, &tol),
            Suite::Contraction => contraction_trial(&mut rng, &tol),
            Suite::VonNeumann => von_neumann_trial(&mut rng, &tol),
            Suite::Bram => bram_trial(&mut rng, &tol),
            Suite::Tower => tower_trial(&mut rng, &tol),
        };
        match outcome {
            Ok(r) => worst = worst.max(r),
            Err(msg) => {
                failures += 1;
                first_failure.get_or_insert((trial, msg));
            }
        }
    }
    let mut r = Report::pass_if(name, failures == 0)
        .field("seed", args.seed)
        .field("trials", args.trials)
        .field("failures", failures)
        .field("worst_residual", worst);
    if let Some((trial, msg)) = first_failure {
        r = r.field("first_failure", format!("trial {trial}: {msg}"));
    }
    Ok(r)
}

fn bound(what: &str, value: f64, limit: f64) -> Trial {
    if value <= limit {
        Ok(value)
    } else {
        Err(format!("{what} {value:e} exceeds {limit:e}"))
    }
}

fn lib<T>(r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn kernel_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let m = rng.random_range(1..=10);
    let rank = rng.random_range(1..=m);
    let k = lib(FiniteKernel::from_gram(random::psd(rng, m, rank)))?;
    let e = lib(kernel::build_embedding(&k, tol))?;
    if e.dim() != rank {
        return Err(format!("embedding dimension {} for rank {rank}", e.dim()));
    }
    bound("round trip", e.round_trip_residual() / (1.0 + linalg::max_abs(k.gram())), 1e-9)
}

fn cp_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let (d, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let phi = random::hermiticity_preserving(rng, d, n, 1e-3);
    let choi = cp::is_completely_positive(&phi, tol);
    let brute = lib(cp::cp_level_check(&phi, &cp::matrix_units(d), tol))?;
    if choi.is_cp != brute.is_positive {
        return Err(format!("Choi says {}, matrix-unit level check says {}", choi.is_cp, brute.is_positive));
    }
    Ok(0.0)
}

fn stinespring_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let (d, n) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let count = rng.random_range(1..=d * n);
    let phi = random::cp_map(rng, d, n, count);
    let pair = lib(cp::stinespring(&phi, tol))?;
    bound("dilation residual", pair.dilation_residual(&phi), 1e-8)?;
    bound("norm residual", pair.norm_residual(&phi), 1e-8)
}

fn naimark_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let (n, k) = (rng.random_range(1..=4), rng.random_range(1..=5));
    let p = random::povm(rng, n, k);
    let d = lib(povm::naimark_dilate(&p, tol))?;
    let ranks: usize = p.effects().iter().map(|e| linalg::gram_factor(e, tol).map(|f| f.rank)).sum::<crate::Result<usize>>().map_err(|e| e.to_string())?;
    if d.k_dim() != ranks {
        return Err(format!("K_dim {} but rank sum {ranks}", d.k_dim()));
    }
    let r = lib(povm::verify_naimark(&p, &d, tol))?;
    bound("naimark residual", r.max_residual.max(r.isometry_residual).max(r.pvm_residual), 1e-9)
}

fn contraction_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let n = rng.random_range(1..=6);
    let steps = rng.random_range(1..=8);
    let a = random::contraction(rng, n);
    let c = lib(Contraction::new(a.clone(), tol))?;
    let d = lib(contraction::sznagy_finite(&c, steps, tol))?;
    bound("unitarity", d.unitarity_residual(), 1e-10)?;
    bound("power residual", d.residuals(&a).into_iter().fold(0.0, f64::max), 1e-8)
}

fn von_neumann_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let n = rng.random_range(1..=4);
    let degree = rng.random_range(0..=8);
    let c = lib(Contraction::new(random::contraction(rng, n), tol))?;
    let p = Polynomial(random::polynomial(rng, degree));
    let r = lib(contraction::von_neumann_check(&c, &p, 4096, tol))?;
    if !r.holds {
        return Err(format!("||p(A)|| = {} exceeds {} + slack {}", r.lhs, r.rhs, r.slack));
    }
    Ok(0.0)
}

fn bram_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let n = rng.random_range(1..=4);
    let degree = rng.random_range(0..=4);
    let a = random::normal(rng, n, 1.5);
    let t = lib(CommutingTuple::single(a, tol))?;
    let cert = lib(subnormal::bram_test(&t, &subnormal::words_up_to(1, degree), tol))?;
    if !cert.passes {
        return Err(format!("normal matrix failed at degree {degree} (min eigenvalue {:e})", cert.min_eigenvalue));
    }
    Ok(0.0)
}

fn tower_trial(rng: &mut DetRng, tol: &Tolerance) -> Trial {
    let n = rng.random_range(2..=3);
    let count = rng.random_range(1..=3);
    let horizon = rng.random_range(1..=3);
    let u = random::ucp(rng, n, count);
    let t = lib(tower::build_tower(&u, horizon, tol))?;
    let ladder = lib(tower::projection_ladder(&t, tol))?;
    if !ladder.is_increasing(tol) {
        return Err("ladder is not increasing".into());
    }
    bound("moment residual", t.moment_residuals.iter().cloned().fold(0.0, f64::max), 1e-8)
}
