use std::fmt::Write as _;

use anyhow::Context;
use semfeat_core::invariance::{check_invariance, describe, standard_battery};
use semfeat_core::io::load_mask;

use super::emit;
use crate::args::InvarianceArgs;
use crate::ToleranceFailure;

/// Report layout: a header line, one line per transform, then a verdict.
pub fn run(args: InvarianceArgs) -> anyhow::Result<()> {
    let vocab = args.vocab.resolve(None)?;
    let mask = load_mask(&args.mask, vocab.seg_categories)?;
    let mut checks = Vec::new();
    for t in standard_battery(&mask) {
        checks.extend(check_invariance(&mask, &[t]).with_context(|| describe(t))?);
    }
    let mut report = format!(
        "invariance {} ({}x{}, {} categories)\n",
        args.mask.display(),
        mask.width(),
        mask.height(),
        mask.categories()
    );
    for c in &checks {
        writeln!(report, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(
        report,
        "{}",
        if failed == 0 {
            "all tolerances met".to_string()
        } else {
            format!("{failed} violation(s)")
        }
    )?;
    emit(&report, args.out.as_deref())?;
    if failed > 0 {
        return Err(
            ToleranceFailure(format!("{failed} transform(s) exceeded their tolerance")).into(),
        );
    }
    Ok(())
}
