# HTTP routers for scenarios, sweeps and maps
