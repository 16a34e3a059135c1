use crate::scalar::Rational;

/// Admissible number of components for SEQ, SET, MSET and the cycles.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Card {
    pub min: usize,
    pub max: Option<usize>,
}

impl Card {
    pub fn any() -> Self {
        Card::default()
    }

    pub fn exactly(k: usize) -> Self {
        Card {
            min: k,
            max: Some(k),
        }
    }

    pub fn at_least(k: usize) -> Self {
        Card { min: k, max: None }
    }

    pub fn at_most(k: usize) -> Self {
        Card {
            min: 0,
            max: Some(k),
        }
    }

    pub fn is_any(&self) -> bool {
        self.min == 0 && self.max.is_none()
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= self.min && self.max.is_none_or(|m| k <= m)
    }
}

/// Which keyword introduced a set construction. Labelled systems read both
/// as the exponential; unlabelled systems read both as the multiset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKeyword {
    Set,
    Mset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleKind {
    Directed,
    /// Same generating function as a directed cycle; the halving for
    /// reflections is written explicitly as a scalar.
    Undirected,
}

/// Right-hand side of a class definition.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    /// The atom `Z`.
    Atom,
    /// The neutral class `1`.
    Epsilon,
    Ref(String),
    Union(Vec<Node>),
    Product(Vec<Node>),
    Seq(Box<Node>, Card),
    Set(Box<Node>, Card, SetKeyword),
    Cycle(Box<Node>, Card, CycleKind),
    /// `c * X`.
    Scalar(Rational, Box<Node>),
    /// `EXP(X)`.
    Exp(Box<Node>),
    /// `LOG(X)`, meaning `log 1/(1 - X)`.
    Log(Box<Node>),
    /// `X^(r)` for rational `r`.
    Pow(Box<Node>, Rational),
    /// `X / Y`.
    Quotient(Box<Node>, Box<Node>),
    /// `SUBST(F, G)`, the composition `F(G(z))`.
    Subst(Box<Node>, Box<Node>),
    /// `TABLE(name)`, coefficients supplied at compile time.
    Table(String),
}

impl Node {
    pub fn class(name: &str) -> Node {
        Node::Ref(name.to_string())
    }

    /// Visit this node and all descendants.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Node)) {
        f(self);
        match self {
            Node::Atom | Node::Epsilon | Node::Ref(_) | Node::Table(_) => {}
            Node::Union(xs) | Node::Product(xs) => xs.iter().for_each(|x| x.walk(f)),
            Node::Seq(x, _)
            | Node::Set(x, _, _)
            | Node::Cycle(x, _, _)
            | Node::Scalar(_, x)
            | Node::Exp(x)
            | Node::Log(x)
            | Node::Pow(x, _) => x.walk(f),
            Node::Quotient(x, y) | Node::Subst(x, y) => {
                x.walk(f);
                y.walk(f);
            }
        }
    }

    /// Class names referenced anywhere below this node.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let Node::Ref(name) = n {
                out.push(name.as_str());
            }
        });
        out
    }
}

/// A parsed specification: an ordered list of `Name = expr` definitions.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecSystem {
    pub labelled: bool,
    pub definitions: Vec<(String, Node)>,
}

impl SpecSystem {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.definitions.iter().position(|(n, _)| n == name)
    }

    pub fn definition(&self, name: &str) -> Option<&Node> {
        self.index_of(name).map(|i| &self.definitions[i].1)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.definitions.iter().map(|(n, _)| n.as_str())
    }

    /// Names of all `TABLE(..)` leaves.
    pub fn tables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for (_, node) in &self.definitions {
            node.walk(&mut |n| {
                if let Node::Table(t) = n {
                    if !out.contains(&t.as_str()) {
                        out.push(t.as_str());
                    }
                }
            });
        }
        out
    }
}
