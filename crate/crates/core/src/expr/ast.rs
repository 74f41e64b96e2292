use std::fmt;

/// Coordinate variables of R^3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Single-argument functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of a closed-form scalar expression in `x`, `y`, `z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Nonnegative finite decimal literal.
    Num(f64),
    Const(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Atan2(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Replaces every coordinate variable by the matching expression.
    pub fn substitute(&self, vars: &[Expr; 3]) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) => self.clone(),
            Expr::Var(v) => vars[v.index()].clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(vars))),
            Expr::Binary(op, l, r) => Expr::binary(*op, l.substitute(vars), r.substitute(vars)),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(vars))),
            Expr::Atan2(a, b) => {
                Expr::Atan2(Box::new(a.substitute(vars)), Box::new(b.substitute(vars)))
            }
        }
    }

    /// Does the expression reference the given variable?
    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Call(_, e) => e.mentions(var),
            Expr::Binary(_, l, r) | Expr::Atan2(l, r) => l.mentions(var) || r.mentions(var),
        }
    }

    // Printing levels: 1 sum, 2 product, 3 negation, 4 power, 5 atom.
    fn level(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn fmt_at(&self, min_level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.fmt_at(0, f)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) if v.fract() == 0.0 && v.abs() < 1e15 => write!(f, "{v}"),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Const(Constant::Pi) => write!(f, "pi"),
            Expr::Const(Constant::E) => write!(f, "e"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_at(4, f)
            }
            Expr::Binary(op, l, r) => {
                let (sym, lmin, rmin) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                l.fmt_at(lmin, f)?;
                write!(f, "{sym}")?;
                r.fmt_at(rmin, f)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_at(0, f)?;
                write!(f, ")")
            }
            Expr::Atan2(a, b) => {
                write!(f, "atan2(")?;
                a.fmt_at(0, f)?;
                write!(f, ", ")?;
                b.fmt_at(0, f)?;
                write!(f, ")")
            }
        }
    }
}

/// Prints in the input grammar with the minimal parentheses needed to
/// reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}
