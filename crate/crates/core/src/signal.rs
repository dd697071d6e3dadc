use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalKind {
    Effort,
    Flow,
    Momentum,
    Displacement,
    Input,
}

impl SignalKind {
    pub fn symbol(self) -> char {
        match self {
            SignalKind::Effort => 'e',
            SignalKind::Flow => 'f',
            SignalKind::Momentum => 'p',
            SignalKind::Displacement => 'q',
            SignalKind::Input => 'u',
        }
    }

    /// Effort and flow trade places; other kinds are unchanged.
    pub fn dual(self) -> SignalKind {
        match self {
            SignalKind::Effort => SignalKind::Flow,
            SignalKind::Flow => SignalKind::Effort,
            other => other,
        }
    }
}

/// A time signal attached to one bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignalVar {
    pub kind: SignalKind,
    pub bond: u32,
}

impl SignalVar {
    pub fn new(kind: SignalKind, bond: u32) -> Self {
        SignalVar { kind, bond }
    }

    pub fn effort(bond: u32) -> Self {
        Self::new(SignalKind::Effort, bond)
    }

    pub fn flow(bond: u32) -> Self {
        Self::new(SignalKind::Flow, bond)
    }

    pub fn momentum(bond: u32) -> Self {
        Self::new(SignalKind::Momentum, bond)
    }

    pub fn displacement(bond: u32) -> Self {
        Self::new(SignalKind::Displacement, bond)
    }

    pub fn input(bond: u32) -> Self {
        Self::new(SignalKind::Input, bond)
    }
}

impl Ord for SignalVar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.bond, self.kind).cmp(&(other.bond, other.kind))
    }
}

impl PartialOrd for SignalVar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignalVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.symbol(), self.bond)
    }
}
