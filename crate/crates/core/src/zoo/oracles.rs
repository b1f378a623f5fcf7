//! Membership predicates written as plain string checks.

/// A named membership predicate over a fixed alphabet.
#[derive(Clone, Copy)]
pub struct LanguageOracle {
    pub name: &'static str,
    pub alphabet: &'static [&'static str],
    pub accepts: fn(&str) -> bool,
}

impl std::fmt::Debug for LanguageOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LanguageOracle").field("name", &self.name).finish()
    }
}

/// Lengths of the maximal runs `a^n b^m c^p` when `s` has that shape.
fn abc_counts(s: &str) -> Option<(usize, usize, usize)> {
    let n = s.chars().take_while(|&c| c == 'a').count();
    let rest = &s[n..];
    let m = rest.chars().take_while(|&c| c == 'b').count();
    let rest = &rest[m..];
    let p = rest.chars().take_while(|&c| c == 'c').count();
    (p == rest.len()).then_some((n, m, p))
}

/// `a^n b^n c` or `a^n b^2n d`.
pub fn oracle_l2(x: &str) -> bool {
    let n = x.chars().take_while(|&c| c == 'a').count();
    let rest = &x[n..];
    let m = rest.chars().take_while(|&c| c == 'b').count();
    match &rest[m..] {
        "c" => m == n,
        "d" => m == 2 * n,
        _ => false,
    }
}

/// `a^n b^n c^m`.
pub fn oracle_lp1(x: &str) -> bool {
    matches!(abc_counts(x), Some((n, m, _)) if n == m)
}

/// `a^n b^m c^m`.
pub fn oracle_lp2(x: &str) -> bool {
    matches!(abc_counts(x), Some((_, m, p)) if m == p)
}

/// `a^n b^n c^n`.
pub fn oracle_anbncn(x: &str) -> bool {
    matches!(abc_counts(x), Some((n, m, p)) if n == m && m == p)
}

/// `a^n b^n` over `{a, b}`.
pub fn oracle_anbn(x: &str) -> bool {
    let n = x.chars().take_while(|&c| c == 'a').count();
    x.len() == 2 * n && x[n..].chars().all(|c| c == 'b')
}

/// Balanced words with `a` opening and `b` closing.
pub fn oracle_dyck(x: &str) -> bool {
    let mut depth = 0i64;
    for c in x.chars() {
        depth += match c {
            'a' => 1,
            'b' => -1,
            _ => return false,
        };
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

pub fn oracle_contains_ab(x: &str) -> bool {
    x.contains("ab")
}

pub fn oracle_all(_: &str) -> bool {
    true
}

/// Block indices in the order they are written, `k >= 3`.
pub fn lk_block_order(k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (2..=k).filter(|i| i % 2 == 0).collect();
    if k % 2 == 1 {
        order.push(k);
    }
    order.extend((3..k).rev().filter(|i| i % 2 == 1));
    order.push(1);
    order
}

/// Membership in `L_k`: blocks `w_2 .. w_k` of shape `a^n b^m c^p` and a
/// final one-letter `w_1`, separated by `#` in the interleaved order of
/// [`lk_block_order`]. When both guards of a middle condition hold, both
/// consequents are required.
pub fn oracle_lk(k: usize, x: &str) -> bool {
    if k < 3 {
        return false;
    }
    let order = lk_block_order(k);
    let parts: Vec<&str> = x.split('#').collect();
    if parts.len() != order.len() {
        return false;
    }
    let mut w1 = "";
    // (n, m, p) for blocks 2..=k, index i - 2
    let mut par = vec![(0usize, 0usize, 0usize); k - 1];
    for (&i, part) in order.iter().zip(&parts) {
        if i == 1 {
            w1 = part;
        } else {
            match abc_counts(part) {
                Some(t) => par[i - 2] = t,
                None => return false,
            }
        }
    }
    let at = |i: usize| par[i - 2];
    let (n2, m2, p2) = at(2);
    let first = match w1 {
        "a" => n2 <= p2,
        "b" => m2 <= p2,
        _ => return false,
    };
    if !first {
        return false;
    }
    for j in 3..k {
        let (n0, m0, p0) = at(j - 1);
        let (n, m, p) = at(j);
        if (n0 == p0 || n0 < m0) && n > m {
            return false;
        }
        if (n0 < p0 || n0 == m0) && n > p {
            return false;
        }
    }
    let (n0, m0, p0) = at(k - 1);
    let (n, m, p) = at(k);
    !(n0 == p0 && n != m || n0 < p0 && n >= p || n0 == m0 && n != p || n0 < m0 && n >= m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_examples() {
        assert!(oracle_l2("c"));
        assert!(oracle_l2("abbd"));
        assert!(oracle_l2("abc"));
        assert!(!oracle_l2("abd"));
        assert!(!oracle_l2("ba"));
        assert!(!oracle_l2(""));
    }

    #[test]
    fn block_orders() {
        assert_eq!(lk_block_order(3), vec![2, 3, 1]);
        assert_eq!(lk_block_order(4), vec![2, 4, 3, 1]);
        assert_eq!(lk_block_order(5), vec![2, 4, 5, 3, 1]);
        assert_eq!(lk_block_order(6), vec![2, 4, 6, 5, 3, 1]);
    }

    #[test]
    fn lk_small_cases() {
        // all blocks empty: (i) 0 <= 0, then n2 = p2 forces n3 = m3 and
        // n2 = m2 forces n3 = p3, all zero
        assert!(oracle_lk(3, "##a"));
        assert!(oracle_lk(3, "##b"));
        assert!(!oracle_lk(3, "###a"));
        assert!(!oracle_lk(3, "##"));
        assert!(!oracle_lk(3, "##c"));
        // n2 > p2 with w1 = a
        assert!(!oracle_lk(3, "a##a"));
        // w1 = b only compares m2 with p2
        assert!(oracle_lk(3, "a##b"));
        // n2 = 1 < p2 = 2 and n2 = m2 = 1: need n3 < p3 and n3 = p3, impossible
        assert!(!oracle_lk(3, "abcc#c#a"));
        // n2 = 0 < p2 = 1 needs n3 < p3
        assert!(!oracle_lk(3, "c#ac#a"));
        // n2 < p2 and n2 < m2: n3 < p3 and n3 < m3
        assert!(oracle_lk(3, "bc#bc#a"));
        assert!(!oracle_lk(3, "bc#b#a"));
    }

    #[test]
    fn lk_middle_condition_is_a_conjunction() {
        // k = 4, layout w2#w4#w3#w1. w2 = "" so n2 = m2 = p2 = 0 and both
        // guards for w3 fire: n3 <= m3 and n3 <= p3.
        // w3 = "ab" (n3=1, m3=1, p3=0) breaks the second consequent.
        assert!(!oracle_lk(4, "##ab#a"));
        // w3 = "abc": both hold; then n3 = p3 and n3 = m3 force n4 = m4 = p4
        assert!(oracle_lk(4, "#abc#abc#a"));
        assert!(!oracle_lk(4, "#ab#abc#a"));
    }

    #[test]
    fn abc_languages() {
        assert!(oracle_lp1("aabbc") && !oracle_lp2("aabbc"));
        // one a, one b, two c's: the a's and b's match, the b's and c's do not
        assert!(oracle_lp1("abcc") && !oracle_lp2("abcc"));
        assert!(oracle_lp2("abbcc") && !oracle_lp1("abbcc"));
        assert!(oracle_lp1("aabbcc") && oracle_lp2("aabbcc") && oracle_anbncn("aabbcc"));
        assert!(!oracle_lp1("acb"));
        assert!(oracle_dyck("aabbab") && !oracle_dyck("ba"));
        assert!(oracle_anbn("") && oracle_anbn("aabb") && !oracle_anbn("abab"));
    }
}
