//! Thompson construction from expressions to guarded NFAs.

use super::ast::NavExpression;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Guard {
    /// Consumes one edge carrying this label.
    EdgeLabel(String),
    /// Consumes one edge of any label.
    AnyEdge,
    /// Consumes nothing; passes iff the current node has `key=value`.
    NodeCheck(String, String),
    Epsilon,
}

impl Guard {
    pub fn consumes_edge(&self) -> bool {
        matches!(self, Guard::EdgeLabel(_) | Guard::AnyEdge)
    }
}

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub guard: Guard,
    pub to: StateId,
}

/// States are `0..state_count`.
#[derive(Clone, Debug)]
pub struct Automaton {
    state_count: usize,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    start: StateId,
    accepting: Vec<bool>,
}

impl Automaton {
    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Transitions leaving `state`.
    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = &Transition> {
        self.outgoing[state].iter().map(|&i| &self.transitions[i])
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_count).filter(|&s| self.accepting[s])
    }
}

#[derive(Default)]
struct Builder {
    states: usize,
    transitions: Vec<Transition>,
}

/// A sub-automaton with one entry and one exit state.
#[derive(Clone, Copy)]
struct Fragment {
    start: StateId,
    end: StateId,
}

impl Builder {
    fn state(&mut self) -> StateId {
        self.states += 1;
        self.states - 1
    }

    fn link(&mut self, from: StateId, guard: Guard, to: StateId) {
        self.transitions.push(Transition { from, guard, to });
    }

    fn guarded(&mut self, guard: Guard) -> Fragment {
        let start = self.state();
        let end = self.state();
        self.link(start, guard, end);
        Fragment { start, end }
    }

    fn empty(&mut self) -> Fragment {
        self.guarded(Guard::Epsilon)
    }

    fn seq(&mut self, a: Fragment, b: Fragment) -> Fragment {
        self.link(a.end, Guard::Epsilon, b.start);
        Fragment {
            start: a.start,
            end: b.end,
        }
    }

    fn optional(&mut self, inner: Fragment) -> Fragment {
        let start = self.state();
        let end = self.state();
        self.link(start, Guard::Epsilon, inner.start);
        self.link(start, Guard::Epsilon, end);
        self.link(inner.end, Guard::Epsilon, end);
        Fragment { start, end }
    }

    fn build(&mut self, e: &NavExpression) -> Fragment {
        use NavExpression::*;
        match e {
            Label(l) => self.guarded(Guard::EdgeLabel(l.clone())),
            AnyLabel => self.guarded(Guard::AnyEdge),
            NodeTest(k, v) => self.guarded(Guard::NodeCheck(k.clone(), v.clone())),
            Concat(a, b) => {
                let a = self.build(a);
                let b = self.build(b);
                self.seq(a, b)
            }
            Alt(a, b) => {
                let start = self.state();
                let end = self.state();
                let a = self.build(a);
                let b = self.build(b);
                for f in [a, b] {
                    self.link(start, Guard::Epsilon, f.start);
                    self.link(f.end, Guard::Epsilon, end);
                }
                Fragment { start, end }
            }
            Star(inner) => {
                let start = self.state();
                let end = self.state();
                let f = self.build(inner);
                self.link(start, Guard::Epsilon, f.start);
                self.link(start, Guard::Epsilon, end);
                self.link(f.end, Guard::Epsilon, f.start);
                self.link(f.end, Guard::Epsilon, end);
                Fragment { start, end }
            }
            Plus(inner) => {
                let start = self.state();
                let end = self.state();
                let f = self.build(inner);
                self.link(start, Guard::Epsilon, f.start);
                self.link(f.end, Guard::Epsilon, f.start);
                self.link(f.end, Guard::Epsilon, end);
                Fragment { start, end }
            }
            Optional(inner) => {
                let f = self.build(inner);
                self.optional(f)
            }
            // `min` mandatory copies, then `max - min` nested optional ones:
            // e{1,3} = e/(e/(e)?)?.
            Repeat(inner, min, max) => {
                let mut frag: Option<Fragment> = None;
                for _ in 0..*min {
                    let f = self.build(inner);
                    frag = Some(match frag {
                        None => f,
                        Some(prev) => self.seq(prev, f),
                    });
                }
                let mut tail: Option<Fragment> = None;
                for _ in *min..*max {
                    let f = self.build(inner);
                    let body = match tail {
                        None => f,
                        Some(t) => self.seq(f, t),
                    };
                    tail = Some(self.optional(body));
                }
                match (frag, tail) {
                    (Some(a), Some(b)) => self.seq(a, b),
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => self.empty(),
                }
            }
        }
    }
}

pub fn compile(e: &NavExpression) -> Automaton {
    let mut b = Builder::default();
    let f = b.build(e);
    let mut outgoing = vec![Vec::new(); b.states];
    for (i, t) in b.transitions.iter().enumerate() {
        outgoing[t.from].push(i);
    }
    let mut accepting = vec![false; b.states];
    accepting[f.end] = true;
    Automaton {
        state_count: b.states,
        transitions: b.transitions,
        outgoing,
        start: f.start,
        accepting,
    }
}
