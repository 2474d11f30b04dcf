"""Reference values frozen into tests/test_reference.cpp.

Every quantity here comes from a definition that does not share code with the
library: plain series in high precision, mpmath special functions, or direct
quadrature. Run: python3 reference_values.py
"""
import mpmath as mp

mp.mp.dps = 60


def wright(lam, delta, z, terms=600):
    lam, delta, z = mp.mpf(lam), mp.mpf(delta), mp.mpf(z)
    return sum(z**n / mp.factorial(n) * mp.rgamma(lam * n + delta) for n in range(terms))


def wright4(a, b, lam, mu, z, terms=800):
    a, b, lam, mu, z = map(mp.mpf, (a, b, lam, mu, z))
    return sum(mp.gamma(a * n + b) * z**n / mp.factorial(n) * mp.rgamma(lam * n + mu) for n in range(terms))


def m_closed(alpha, z):
    if abs(alpha - mp.mpf(1) / 2) < 1e-20:
        return mp.exp(-z * z / 4) / mp.sqrt(mp.pi)
    if abs(alpha - mp.mpf(1) / 3) < 1e-20:
        return mp.mpf(3)**(mp.mpf(2) / 3) * mp.airyai(z / mp.mpf(3)**(mp.mpf(1) / 3))
    raise ValueError(alpha)


def gsc_pdf(alpha, sigma, d, p, x):
    # C (x/sigma)^(d-1) F_alpha((x/sigma)^p), F_alpha(z) = alpha z M_alpha(z);
    # the constant is fixed numerically rather than taken from a closed form.
    def shape(t):
        y = t / sigma
        z = y**p
        return y**(d - 1) * alpha * z * m_closed(alpha, z)
    norm = mp.quad(shape, [0, sigma / 2, sigma, 2 * sigma, 6 * sigma, mp.inf])
    return shape(mp.mpf(x)) / norm


def chi_bar_alpha1(k, x):
    # sqrt(chi^2_k / k)
    k, x = mp.mpf(k), mp.mpf(x)
    return 2 * (k / 2)**(k / 2) / mp.gamma(k / 2) * x**(k - 1) * mp.exp(-k * x * x / 2)


def gsas_m2_by_mixture(k):
    # alpha = 1: Var = E[N^2] E[S^-2] with S ~ chi-bar_{1,k}
    return mp.quad(lambda s: chi_bar_alpha1(k, s) / s**2, [0, 1, mp.inf])


def show(name, rows):
    print(f"// {name}")
    for r in rows:
        print("{" + ", ".join(mp.nstr(v, 17) if isinstance(v, mp.mpf) else repr(v) for v in r) + "},")


if __name__ == "__main__":
    mp.mp.dps = 60
    show("M-Wright closed forms alpha z value", [
        (a, z, m_closed(a, z)) for a, z in [(0.5, 1.7), (mp.mpf(1) / 3, 0.9), (mp.mpf(1) / 3, 4.0)]])
    show("wright lambda delta z value", [
        (l, dl, z, wright(l, dl, z))
        for l, dl, z in [(0.5, 1.0, -1.3), (0.3, 0.5, 2.0), (0.8, 1.7, -0.5), (1.0, 1.0, 2.5),
                         (-0.3, 0.7, -2.0), (-0.6, 0.4, 1.5)]])
    show("wright4 a b lambda mu z value", [
        (a, b, l, m, z, wright4(a, b, l, m, z))
        for a, b, l, m, z in [(0.5, 1.0, 1.0, 2.0, -0.7), (1.0, 0.5, 1.5, 1.0, 1.2)]])
    show("kummer b c z value", [
        (b, c, z, mp.hyp1f1(b, c, z))
        for b, c, z in [(0.5, 1.5, -3.0), (1.2, 2.5, 4.0), (2.0, 3.3, -30.0), (0.25, 0.5, 10.0),
                        (-0.5, 0.5, -8.0)]])
    show("gsc alpha sigma d p x pdf", [
        (a, s, d, p, x, gsc_pdf(a, s, d, p, x))
        for a, s, d, p, x in [(0.5, 1.0, 1.0, 1.0, 0.7), (0.5, 2.0, 2.0, 1.5, 1.1),
                              (mp.mpf(1) / 3, 1.0, 0.5, 2.0, 0.9), (mp.mpf(1) / 3, 0.5, 3.0, 0.8, 2.0)]])
    show("chi-bar alpha=1 k x pdf", [
        (k, x, chi_bar_alpha1(k, x)) for k, x in [(1, 0.5), (3, 1.2), (7, 0.8), (20, 1.05)]])
    show("gsas alpha=1 variance by mixture quadrature", [
        (k, gsas_m2_by_mixture(k)) for k in [3, 5, 9]])
