//! Participation-shift classification of a candidate event relative to the
//! event that immediately preceded it.

use serde::{Deserialize, Serialize};

/// Shift from the previous event `AB` to a candidate. `0` denotes the
/// designated group actor; `X` and `Y` are third parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PShiftLabel {
    AbBa,
    AbB0,
    AbBy,
    A0X0,
    A0Xa,
    A0Xy,
    AbX0,
    AbXa,
    AbXb,
    AbXy,
    A0Ay,
    AbA0,
    AbAy,
    None,
}

impl PShiftLabel {
    pub const ALL: [PShiftLabel; 13] = [
        PShiftLabel::AbBa,
        PShiftLabel::AbB0,
        PShiftLabel::AbBy,
        PShiftLabel::A0X0,
        PShiftLabel::A0Xa,
        PShiftLabel::A0Xy,
        PShiftLabel::AbX0,
        PShiftLabel::AbXa,
        PShiftLabel::AbXb,
        PShiftLabel::AbXy,
        PShiftLabel::A0Ay,
        PShiftLabel::AbA0,
        PShiftLabel::AbAy,
    ];

    /// Short form, e.g. `AB-BA`.
    pub fn code(self) -> &'static str {
        match self {
            PShiftLabel::AbBa => "AB-BA",
            PShiftLabel::AbB0 => "AB-B0",
            PShiftLabel::AbBy => "AB-BY",
            PShiftLabel::A0X0 => "A0-X0",
            PShiftLabel::A0Xa => "A0-XA",
            PShiftLabel::A0Xy => "A0-XY",
            PShiftLabel::AbX0 => "AB-X0",
            PShiftLabel::AbXa => "AB-XA",
            PShiftLabel::AbXb => "AB-XB",
            PShiftLabel::AbXy => "AB-XY",
            PShiftLabel::A0Ay => "A0-AY",
            PShiftLabel::AbA0 => "AB-A0",
            PShiftLabel::AbAy => "AB-AY",
            PShiftLabel::None => "none",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|l| l.code() == code)
    }

    /// False for the labels that need a group actor.
    pub fn is_dyadic(self) -> bool {
        matches!(
            self,
            PShiftLabel::AbBa
                | PShiftLabel::AbBy
                | PShiftLabel::AbXa
                | PShiftLabel::AbXb
                | PShiftLabel::AbXy
                | PShiftLabel::AbAy
        )
    }
}

/// Classifies `cand = (sender, receiver)` given the previous event.
///
/// With `group = Some(g)`, actor `g` stands for the whole group: events sent
/// to `g` are undirected turns, and the non-dyadic labels become reachable.
/// Events sent by `g` carry no label.
pub fn classify_pshift(
    prev: Option<(usize, usize)>,
    cand: (usize, usize),
    group: Option<usize>,
) -> PShiftLabel {
    let Some((a, b)) = prev else {
        return PShiftLabel::None;
    };
    let (x, y) = cand;
    if let Some(g) = group {
        if x == g || a == g {
            return PShiftLabel::None;
        }
        if b == g {
            return match (x == a, y == g, y == a) {
                (true, true, _) => PShiftLabel::None,
                (true, false, _) => PShiftLabel::A0Ay,
                (false, true, _) => PShiftLabel::A0X0,
                (false, false, true) => PShiftLabel::A0Xa,
                (false, false, false) => PShiftLabel::A0Xy,
            };
        }
        if y == g {
            return if x == a {
                PShiftLabel::AbA0
            } else if x == b {
                PShiftLabel::AbB0
            } else {
                PShiftLabel::AbX0
            };
        }
    }
    if x == b {
        if y == a {
            PShiftLabel::AbBa
        } else {
            PShiftLabel::AbBy
        }
    } else if x == a {
        if y == b {
            PShiftLabel::None
        } else {
            PShiftLabel::AbAy
        }
    } else if y == a {
        PShiftLabel::AbXa
    } else if y == b {
        PShiftLabel::AbXb
    } else {
        PShiftLabel::AbXy
    }
}
