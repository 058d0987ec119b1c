//! `list`: the built-in domains, coefficient sets and volatility policies.

use crate::error::RunError;

/// `(name, parameters, notes)`; the README section named in the header
/// documents each entry.
type Entry = (&'static str, &'static str, &'static str);

const DOMAINS: &[Entry] = &[
    ("half-line", "r0=1 delta=r0 beta=1", "(0, inf) in 1-D, {x_1 > 0} beyond; closed-form Skorokhod map"),
    ("half-space", "normal offset r0 delta beta", "{<n, x> > offset}"),
    ("ball", "center radius; r0=radius delta=radius/2 beta=2", "convex, smooth boundary"),
    ("box", "lo hi; delta=side/4 beta=sqrt(d)", "axis-parallel box, convex corners"),
    ("polytope", "faces=[[n.., offset], ..] delta=1/4 beta=2", "intersection of half-spaces; needs solver.x0"),
    ("shell", "center inner outer; r0=inner delta=inner/2 beta=2 kappa=2", "non-convex annulus with the shell psi"),
    ("l-shape", "lo hi corner; r0=1/2", "reentrant corner; fails the exterior-ball check"),
];

const COEFFICIENTS: &[Entry] = &[
    ("none", "", "no coefficients: reflected G-Brownian motion"),
    ("zero", "", "f = g = h = 0"),
    ("constant-drift", "drift=[..]", "f = const"),
    ("identity", "", "g^j = e_j"),
    ("trig-bounded", "a=1 b=0.1", "f_i = -a sin x_i, g^j = (1 + b cos x_j) e_j; the acceptance set"),
    ("<any>+shift", "shift=[..]", "adds a constant to the drift"),
];

const POLICIES: &[Entry] = &[
    ("high", "", "constant extremal volatility, largest trace"),
    ("low", "", "constant extremal volatility, smallest trace"),
    ("iid", "n_scenarios", "independent uniform draws per cell"),
    ("bang-bang-time", "switch_time", "high before the switch, low after"),
    ("bang-bang-state", "threshold", "high while B_1 >= threshold"),
    ("feedback", "gbm only", "high where the G-heat solution is convex"),
];

pub fn render(kind: &str) -> Result<String, RunError> {
    let (title, rows) = match kind {
        "domains" => ("Domains (README: Domains)", DOMAINS),
        "coefficients" => ("Coefficient sets (README: Coefficients)", COEFFICIENTS),
        "policies" => ("Volatility policies (README: Policies)", POLICIES),
        other => {
            return Err(RunError::validation("list", format!("unknown kind `{other}`; use domains, coefficients or policies")))
        }
    };
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out = format!("{title}\n");
    for (name, params, note) in rows {
        out.push_str(&format!("  {name:<w0$}  {params:<w1$}  {note}\n"));
    }
    Ok(out)
}
