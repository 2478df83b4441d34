# pilotmesh test suite
