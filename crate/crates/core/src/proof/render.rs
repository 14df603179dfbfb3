use std::collections::HashSet;
use std::fmt::Write;
use std::sync::Arc;

use crate::dsl::print_value;
use crate::proof::witness::{Difference, Step, Witness};
use crate::proof::ProofNode;
use crate::state::StateId;
use crate::weight::Weight;

/// Renders a proof as stacked inferences: premises (subproofs indented, then
/// the relation and the witnessed inequality), a rule line, the conclusion.
/// A subproof already shown earlier is referred to by its goal.
pub fn render_text<W: Weight>(t: &Arc<ProofNode<W>>) -> String {
    let mut lines = Vec::new();
    let mut shown = HashSet::new();
    render(t, 0, &mut shown, &mut lines);
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn render<W: Weight>(
    t: &Arc<ProofNode<W>>,
    indent: usize,
    shown: &mut HashSet<*const ProofNode<W>>,
    lines: &mut Vec<String>,
) {
    let pad = " ".repeat(indent);
    let conclusion = format!("{} # {}", t.goal.0, t.goal.1);
    if !shown.insert(Arc::as_ptr(t)) {
        lines.push(format!("{pad}{conclusion}   (proved above)"));
        return;
    }
    for child in &t.children {
        render(child, indent + 2, shown, lines);
    }
    let mut premises = Vec::new();
    if !t.relation.is_empty() {
        let u = t.relation.universe();
        let pairs: Vec<String> = t
            .relation
            .unordered_index_pairs()
            .into_iter()
            .map(|(i, j)| format!("({}, {})", u.state(i), u.state(j)))
            .collect();
        premises.push(format!("R = {{{}}}", pairs.join(", ")));
    }
    premises.push(witness_text(&t.goal, &t.witness));
    let width = premises.iter().chain([&conclusion]).map(|l| l.chars().count()).max().unwrap();
    let mut label = t.rule.to_string();
    if let Some(z) = &t.covering_z {
        let names: Vec<&str> = z.iter().map(|s| s.name()).collect();
        let _ = write!(label, ", Z = {{{}}}", names.join(", "));
    }
    lines.extend(premises.into_iter().map(|p| format!("{pad}{p}")));
    lines.push(format!("{pad}{} {label}", "─".repeat(width)));
    lines.push(format!("{pad}{conclusion}"));
}

/// The inequality a witness certifies, e.g. `γ(x)[x1] = 1/2 ≠ 2/5 = γ(y)[x1]`.
pub(crate) fn witness_text<W: Weight>(goal: &(StateId, StateId), w: &Witness<W>) -> String {
    let mut suffix = String::new();
    for step in &w.path {
        match step {
            Step::Label(l) => {
                let _ = write!(suffix, "({l})");
            }
            other => {
                let _ = write!(suffix, ".{other}");
            }
        }
    }
    let (lhs, rhs) = (format!("γ({}){suffix}", goal.0), format!("γ({}){suffix}", goal.1));
    match &w.detail {
        Difference::Mass { class, left, right } => {
            let k = print_value(class);
            format!("{lhs}[{k}] = {left} ≠ {right} = {rhs}[{k}]")
        }
        Difference::Classes { left, right } => format!("{lhs} = [{left}] ≠ [{right}] = {rhs}"),
        Difference::Constants { left, right } => format!("{lhs} = {left} ≠ {right} = {rhs}"),
        Difference::Sides { left, right } => format!("{lhs} = {left} _ ≠ {right} _ = {rhs}"),
        Difference::Element { element, in_left } => {
            let e = print_value(element);
            if *in_left {
                format!("[{e}] ∈ {lhs}, [{e}] ∉ {rhs}")
            } else {
                format!("[{e}] ∉ {lhs}, [{e}] ∈ {rhs}")
            }
        }
    }
}
