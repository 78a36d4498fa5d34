"""levyforge: jump-diffusion simulation, calibration, and hybrid forecasting.

Subpackages
-----------
data        CSV ingestion, scalers, windowing, fractional differencing
processes   GBM / compound Poisson / Merton / fractional Heston simulators,
            alpha-stable sampling, tempered-stable Levy tooling
neural      from-scratch dense net and LSTM with exact gradients, Adam
optimizers  Grey Wolf Optimizer and Marine Predators Algorithm
calibrate   moment-matching calibration (NN-gradient and MPA) with penalties
forecast    GWO-tuned LSTM, hybrid LSTM + jump-diffusion ensemble, metrics
cli         command-line pipeline front end
"""

__version__ = "0.1.0"
