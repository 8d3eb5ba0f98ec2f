# Independent reference values by dense / Lanczos diagonalisation (no split-step).
import os
import numpy as np
from scipy.sparse.linalg import eigsh, LinearOperator
np.set_printoptions(precision=17)
def grid(L,n):
    x=-L/2+np.arange(n)*L/n; k=2*np.pi*np.fft.fftfreq(n,L/n); return x,k
def mi(dx,L): return dx-L*np.round(dx/L)
def ven(x,sites,L,V0=-1,a=1,lam=1.11):
    v=np.zeros_like(x)
    for s in sites:
        r=np.abs(mi(x-s,L)); v+=V0/np.sqrt(r*r+a*a)*np.exp(-r/lam)
    return v
def T1(L,n):
    x,k=grid(L,n); F=np.fft.fft(np.eye(n),axis=0)
    return np.real(np.fft.ifft(0.5*k[:,None]**2*F,axis=0))
def one(L,n,v):
    H=T1(L,n)+np.diag(v); w,U=np.linalg.eigh(H); return w[0],U[:,0]
L,n=20.0,128; x,_=grid(L,n)
print("single_well_E", repr(one(L,n,ven(x,[0.0],L))[0]))
print("harmonic_E_L20_n256", repr(one(20.0,256,0.5*grid(20.0,256)[0]**2)[0]))
# two particles, diatomic d=4, L=18, n=64
L,n,d=18.0,64,4.0; x,k=grid(L,n); h=L/n
v=ven(x,[-d/2,d/2],L); V=v[:,None]+v[None,:]+1/np.sqrt(mi(x[:,None]-x[None,:],L)**2+1)
K=0.5*(k[:,None]**2+k[None,:]**2)
def mv(p):
    p=p.reshape(n,n); return (np.real(np.fft.ifft2(K*np.fft.fft2(p)))+V*p).ravel()
A=LinearOperator((n*n,n*n),matvec=mv,dtype=float)
w,U=eigsh(A,k=1,which='SA',tol=1e-13)
psi=U[:,0].reshape(n,n); psi/=np.sqrt((psi**2).sum()*h*h)
rho=psi@psi.T*h
print("diatomic_E", repr(w[0]), "purity", repr(np.sum(rho*rho)*h*h))
dens=np.diag(rho)/np.trace(rho)/h
print("diatomic_density_at_0", repr(dens[n//2]), "max", repr(dens.max()))
# Hartree SCF by diagonalisation
T=T1(L,n); vee=lambda r: 1/np.sqrt(r*r+1)
C=vee(mi(x[:,None]-x[None,:],L))
phis=[np.exp(-(x+d/2)**2/4),np.exp(-(x-d/2)**2/4)]
phis=[p/np.sqrt((p*p).sum()*h) for p in phis]
for it in range(500):
    new=[]
    for i in range(2):
        j=1-i; vh=C@(phis[j]**2)*h
        H=T+np.diag(v+vh); ww,UU=np.linalg.eigh(H)
        # choose the eigenvector localised on the same side
        cand=UU[:,0]
        # ground state of the asymmetric problem is localised on i's side already
        c=cand/np.sqrt((cand*cand).sum()*h); c*=np.sign(c.sum())
        new.append(c)
    delta=max(np.abs(new[i]**2-phis[i]**2).max() for i in range(2))
    phis=new
    if delta<1e-14: break
print("hartree iterations", it, "delta", delta)
hd=(phis[0]**2+phis[1]**2)/2
print("hartree_density_at_left_site", repr(hd[np.argmin(np.abs(x+d/2))]), "at0", repr(hd[n//2]))
np.savetxt(os.path.join(os.path.dirname(__file__), "..", "data", "hartree_density_L18_n64.txt"), hd)
