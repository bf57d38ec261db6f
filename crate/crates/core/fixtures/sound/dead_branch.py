class Live:
    def go(self):
        return 1

class Dead:
    def go(self):
        return 2

def main():
    x = Live()
    if False:
        x = Dead()
    x.go()
