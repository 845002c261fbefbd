import mpmath as mp
mp.mp.dps = 40
def show(l, eta, z):
    F = mp.coulombf(l, eta, z); G = mp.coulombg(l, eta, z)
    dF = mp.diff(lambda x: mp.coulombf(l, eta, x), z)
    dG = mp.diff(lambda x: mp.coulombg(l, eta, x), z)
    Hp = G + 1j*F; Hm = G - 1j*F
    print(f"l={l} eta={eta} z={z}")
    for name, v in [("F",F),("dF",dF),("H+",Hp),("dH+",dG+1j*dF),("H-",Hm),("dH-",dG-1j*dF)]:
        v = mp.mpc(v)
        print(f"  {name}: {mp.nstr(v.real,17)} {mp.nstr(v.imag,17)}")
show(0, 1, 5)
show(2, mp.mpf('0.7'), mp.mpc(3,1))
show(1, mp.mpc('1.2','0.48'), mp.mpc('3.5','-1.4'))
show(2, mp.mpc('0.7','0.09'), mp.mpc('7.4','-1.0'))
show(0, mp.mpf('6.5'), mp.mpf('0.9'))
show(3, mp.mpc('0.3','0.2'), mp.mpc('-4','6'))
print("erf1", mp.nstr(mp.erf(1),17))
