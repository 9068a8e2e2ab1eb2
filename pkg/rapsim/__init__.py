# RAP assistance-network simulator
