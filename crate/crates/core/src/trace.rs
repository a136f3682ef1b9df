//! Export of the discrimination and correction circuits as a flat gate list.
//!
//! In the exported circuit every ancilla gets its own id after the `n`
//! system qubits, starts in `|0⟩`, and is prepared with `X` when a stored bit
//! is one. All readouts are emitted at the end of their part as `MEASURE`
//! entries; no gate is classically controlled.

use serde::{Deserialize, Serialize};

use crate::correct::{fix_bit_gates, fix_phase_gates, strip_phase_gates, Mode};
use crate::discriminate::{parity_gates, phase_gates, Signature};
use crate::gate::{Gate, QubitId};
use crate::gbs::GbsLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureTag {
    #[serde(rename = "MEASURE")]
    Measure,
}

/// Terminal computational-basis readout of an ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub gate: MeasureTag,
    pub q: QubitId,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceEntry {
    Gate(Gate<f64>),
    Measure(MeasureEntry),
}

impl TraceEntry {
    pub fn measure(q: QubitId) -> Self {
        TraceEntry::Measure(MeasureEntry {
            gate: MeasureTag::Measure,
            q,
        })
    }

    pub fn as_gate(&self) -> Option<&Gate<f64>> {
        match self {
            TraceEntry::Gate(g) => Some(g),
            TraceEntry::Measure(_) => None,
        }
    }
}

/// Which pieces of the protocol to export.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceSelection {
    pub part1: bool,
    pub part2: bool,
    /// Part-2 steps to include; index 0 is step 1.
    pub steps: [bool; 3],
    pub mode: Mode,
}

impl TraceSelection {
    pub fn all(mode: Mode) -> Self {
        Self {
            part1: true,
            part2: true,
            steps: [true; 3],
            mode,
        }
    }

    pub fn part1_only() -> Self {
        Self {
            part2: false,
            ..Self::all(Mode::Full)
        }
    }

    pub fn part2_only(mode: Mode) -> Self {
        Self {
            part1: false,
            ..Self::all(mode)
        }
    }

    /// Restricts part 2 to a single step (1, 2 or 3).
    pub fn only_step(mut self, step: usize) -> Self {
        self.steps = [step == 1, step == 2, step == 3];
        self
    }
}

struct Builder {
    entries: Vec<TraceEntry>,
    next_ancilla: QubitId,
    pending: Vec<QubitId>,
}

impl Builder {
    fn ancilla(&mut self, init: u8) -> QubitId {
        let a = self.next_ancilla;
        self.next_ancilla += 1;
        if init & 1 == 1 {
            self.entries.push(TraceEntry::Gate(Gate::x(a)));
        }
        a
    }

    fn gates(&mut self, gates: Vec<Gate<f64>>) {
        self.entries.extend(gates.into_iter().map(TraceEntry::Gate));
    }

    fn read_later(&mut self, a: QubitId) {
        self.pending.push(a);
    }

    fn flush_reads(&mut self) {
        for a in std::mem::take(&mut self.pending) {
            self.entries.push(TraceEntry::measure(a));
        }
    }
}

/// Ordered circuit for `label`: part 1 on fresh ancillas, then part 2
/// driven by the signature part 1 yields.
pub fn trace(label: &GbsLabel, selection: TraceSelection) -> Vec<TraceEntry> {
    let n = label.n();
    let signature = Signature::of_label(label);
    let mut b = Builder {
        entries: Vec::new(),
        next_ancilla: n + 1,
        pending: Vec::new(),
    };

    if selection.part1 {
        let a = b.ancilla(0);
        b.gates(phase_gates(n, a));
        b.read_later(a);
        for i in 1..n {
            let a = b.ancilla(0);
            b.gates(parity_gates(i, a));
            b.read_later(a);
        }
        b.flush_reads();
    }

    if selection.part2 {
        if selection.mode == Mode::Full && selection.steps[0] {
            // Discarded without readout.
            let a = b.ancilla(0);
            b.gates(strip_phase_gates(n, a));
        }
        if selection.steps[1] {
            let a = b.ancilla(signature.phi);
            b.gates(fix_phase_gates(n, a));
            b.read_later(a);
        }
        if selection.steps[2] {
            for (k, &p) in signature.parity.iter().enumerate() {
                let a = b.ancilla(p);
                b.gates(fix_bit_gates(k + 1, a));
                b.read_later(a);
            }
        }
        b.flush_reads();
    }
    b.entries
}

/// Highest qubit id referenced by a trace.
pub fn width(entries: &[TraceEntry]) -> QubitId {
    entries
        .iter()
        .flat_map(|e| match e {
            TraceEntry::Gate(g) => g.qubits(),
            TraceEntry::Measure(m) => vec![m.q],
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(s: &str) -> GbsLabel {
        s.parse().unwrap()
    }

    fn gates(entries: &[TraceEntry]) -> Vec<Gate<f64>> {
        entries
            .iter()
            .filter_map(|e| e.as_gate().copied())
            .collect()
    }

    #[test]
    fn part1_bell() {
        let t = trace(&label("2:0:+"), TraceSelection::part1_only());
        assert_eq!(
            gates(&t),
            vec![
                Gate::h(3),
                Gate::cnot(3, 1),
                Gate::cnot(3, 2),
                Gate::h(3),
                Gate::cnot(1, 4),
                Gate::cnot(2, 4),
            ]
        );
        assert_eq!(t[6..], [TraceEntry::measure(3), TraceEntry::measure(4)]);
    }

    #[test]
    fn part2_step1_ghz() {
        let t = trace(
            &label("3:0:+"),
            TraceSelection::part2_only(Mode::Full).only_step(1),
        );
        assert_eq!(
            gates(&t),
            vec![
                Gate::h(4),
                Gate::cnot(4, 1),
                Gate::cnot(4, 2),
                Gate::cnot(4, 3),
                Gate::cnot(3, 4)
            ]
        );
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn stored_bits_prepare_ancillas() {
        // φ = 1, p = [1]
        let t = trace(&label("2:1:-"), TraceSelection::part2_only(Mode::Discrete));
        assert_eq!(t[0], TraceEntry::Gate(Gate::x(3)));
        assert!(t.contains(&TraceEntry::Gate(Gate::x(4))));
        assert!(t.contains(&TraceEntry::Gate(Gate::cz(3, 2))));
        assert_eq!(width(&t), 4);
    }

    #[test]
    fn json_shape() {
        let t = trace(&label("2:0:+"), TraceSelection::part1_only());
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.starts_with(r#"[{"gate":"H","q":3},{"gate":"CNOT","c":3,"t":1}"#));
        assert!(text.ends_with(r#"{"gate":"MEASURE","q":3},{"gate":"MEASURE","q":4}]"#));
        let back: Vec<TraceEntry> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, t);
    }
}
