use std::fmt;
use std::net::IpAddr;

use ipnet::IpNet;

use crate::snapshot::Traffic;

/// Parses a CIDR prefix or a bare address (a host prefix). Host bits below
/// the mask are cleared.
pub fn parse_prefix(text: &str) -> Result<IpNet, String> {
    if text.contains('/') {
        text.parse::<IpNet>()
            .map(|net| net.trunc())
            .map_err(|_| format!("malformed CIDR prefix {text:?}"))
    } else {
        text.parse::<IpAddr>()
            .map(IpNet::from)
            .map_err(|_| format!("malformed address {text:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrefixField {
    Dst,
    Src,
}

impl PrefixField {
    pub fn keyword(self) -> &'static str {
        match self {
            PrefixField::Dst => "dstPrefix",
            PrefixField::Src => "srcPrefix",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrefixTest {
    Eq(IpNet),
    Ne(IpNet),
    In(Vec<IpNet>),
}

/// A boolean condition on the traffic of a FEC.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrefixPredicate {
    True,
    Atom(PrefixField, PrefixTest),
    And(Box<PrefixPredicate>, Box<PrefixPredicate>),
    Or(Box<PrefixPredicate>, Box<PrefixPredicate>),
    Not(Box<PrefixPredicate>),
}

fn contained(inner: &IpNet, outer: &IpNet) -> bool {
    outer.contains(inner)
}

impl PrefixPredicate {
    /// Evaluates against traffic prefixes. `field == C` holds when the
    /// traffic prefix lies within `C`; a missing source prefix lies within
    /// nothing.
    pub fn matches_prefixes(&self, dst: &IpNet, src: Option<&IpNet>) -> bool {
        match self {
            PrefixPredicate::True => true,
            PrefixPredicate::Atom(field, test) => {
                let value = match field {
                    PrefixField::Dst => Some(dst),
                    PrefixField::Src => src,
                };
                match (test, value) {
                    (PrefixTest::Eq(c), Some(v)) => contained(v, c),
                    (PrefixTest::Ne(c), Some(v)) => !contained(v, c),
                    (PrefixTest::In(cs), Some(v)) => cs.iter().any(|c| contained(v, c)),
                    (PrefixTest::Ne(_), None) => true,
                    (_, None) => false,
                }
            }
            PrefixPredicate::And(a, b) => a.matches_prefixes(dst, src) && b.matches_prefixes(dst, src),
            PrefixPredicate::Or(a, b) => a.matches_prefixes(dst, src) || b.matches_prefixes(dst, src),
            PrefixPredicate::Not(a) => !a.matches_prefixes(dst, src),
        }
    }
}

pub fn match_predicate(pred: &PrefixPredicate, traffic: &Traffic) -> Result<bool, String> {
    let dst = parse_prefix(&traffic.dst_prefix)?;
    let src = traffic.src_prefix.as_deref().map(parse_prefix).transpose()?;
    Ok(pred.matches_prefixes(&dst, src.as_ref()))
}

impl fmt::Display for PrefixPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrefixPredicate::True => f.write_str("true"),
            PrefixPredicate::Atom(field, test) => {
                let field = field.keyword();
                match test {
                    PrefixTest::Eq(c) => write!(f, "{field} == {c}"),
                    PrefixTest::Ne(c) => write!(f, "{field} != {c}"),
                    PrefixTest::In(cs) => {
                        write!(f, "{field} in {{")?;
                        for (i, c) in cs.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{c}")?;
                        }
                        f.write_str("}")
                    }
                }
            }
            PrefixPredicate::And(a, b) => write!(f, "({a} and {b})"),
            PrefixPredicate::Or(a, b) => write!(f, "({a} or {b})"),
            PrefixPredicate::Not(a) => write!(f, "not {a}"),
        }
    }
}
